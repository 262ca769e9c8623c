#include <doctest.h>

#include <cmath>
#include <vector>

#include "mfsync/hypotheses.hpp"

using namespace mfsync;

namespace {

// Winfree on the diagonal, normalized units
double winfree_diag(double omega, double kappa, double s) {
  const double c = std::cos(kTwoPi * s);
  return (omega - kappa * (1 + c) * std::sin(kTwoPi * s)) / kTwoPi;
}

double winfree_lambda(double omega, double kappa, double s) {
  const double c = std::cos(kTwoPi * s);
  return -kappa * (1 + c) * c / winfree_diag(omega, kappa, s);
}

// Lambda is smooth and periodic, so the trapezoid rule converges geometrically
double trapezoid_integral(double omega, double kappa, int m) {
  double sum = 0.0;
  for (int k = 0; k < m; ++k) sum += winfree_lambda(omega, kappa, static_cast<double>(k) / m);
  return sum / m;
}

}  // namespace

TEST_CASE("Kuramoto: constant Lambda = -2 pi kappa / omega") {
  for (auto [omega, kappa] : {std::pair{1.0, 0.2}, {2.0, 1.0}, {0.5, 0.3}}) {
    const auto r = check_hypotheses(builtin_kuramoto(omega, kappa, 5));
    CHECK(r.holds_h);
    CHECK(r.holds_hstar);
    CHECK(r.alpha == doctest::Approx(omega / kTwoPi).epsilon(1e-13));
    CHECK(r.lambda_integral == doctest::Approx(-kTwoPi * kappa / omega).epsilon(1e-12));
    CHECK(r.lambda1 == doctest::Approx(kTwoPi * kappa / omega).epsilon(1e-12));
    CHECK(std::abs(r.lambda2) < 1e-12);
    CHECK(r.l_total == doctest::Approx((omega + kappa) / kTwoPi + kappa + kTwoPi * kappa));
    CHECK(r.diagnostic.empty());
  }
}

TEST_CASE("Winfree alpha against a brute-force grid minimum") {
  for (auto [omega, kappa] : {std::pair{2.0, 1.0}, {1.4, 1.0}, {3.0, 0.5}}) {
    double brute = 1e300;
    const int m = 1'000'000;
    for (int k = 0; k < m; ++k) brute = std::min(brute, winfree_diag(omega, kappa, double(k) / m));
    CHECK(compute_alpha(builtin_winfree(omega, kappa, 3)) == doctest::Approx(brute).epsilon(1e-9));
  }
}

TEST_CASE("Winfree (H) boundary at omega = (3 sqrt 3 / 4) kappa") {
  const double ratio = 3.0 * std::sqrt(3.0) / 4.0;
  for (double kappa : {0.5, 1.0, 2.0}) {
    CHECK(compute_alpha(builtin_winfree(ratio * kappa * (1 + 1e-6), kappa, 3)) > 0.0);
    CHECK(compute_alpha(builtin_winfree(ratio * kappa * (1 - 1e-6), kappa, 3)) < 0.0);
  }
  const auto r = check_hypotheses(builtin_winfree(1.25, 1.0, 4));
  CHECK_FALSE(r.holds_h);
  CHECK_FALSE(r.holds_hstar);
  CHECK(std::isnan(r.lambda1));
  CHECK_FALSE(r.diagnostic.empty());
}

TEST_CASE("Winfree Lambda integral against a periodic trapezoid oracle") {
  const double omega = 2.0, kappa = 1.0;
  const auto r = check_hypotheses(builtin_winfree(omega, kappa, 4));
  CHECK(r.lambda_integral == doctest::Approx(trapezoid_integral(omega, kappa, 20000)).epsilon(1e-10));
  CHECK(r.holds_hstar);
}

TEST_CASE("lambda2 against a fine cumulative oracle") {
  // Winfree shifted a quarter period along the diagonal,
  // omega - kappa (1 - sin y) cos z, so I(s) first rises
  const double omega = 1.5, kappa = 1.0;
  const auto shifted = normalize_period(make_trig_model(
      3, omega, {{-kappa, TrigFn::one, 0, TrigFn::cos, 1}, {kappa, TrigFn::sin, 1, TrigFn::cos, 1}}));
  const int m = 400000;
  double cum = 0.0, lo = 0.0, hi = 0.0;
  double prev = winfree_lambda(omega, kappa, 0.25);
  for (int k = 1; k <= m; ++k) {
    const double cur = winfree_lambda(omega, kappa, 0.25 + double(k) / m);
    cum += 0.5 * (prev + cur) / m;
    prev = cur;
    lo = std::min(lo, cum);
    hi = std::max(hi, cum);
  }
  const auto r = check_hypotheses(shifted);
  REQUIRE(r.holds_hstar);
  CHECK(r.lambda1 == doctest::Approx(-cum).epsilon(1e-8));
  CHECK(r.lambda2 == doctest::Approx(cum + hi - lo).epsilon(1e-7));
  CHECK(r.lambda2 > 0.1);

  // unshifted, I decreases from s = 0 to its minimum before recovering less than it lost
  const auto plain = check_hypotheses(builtin_winfree(omega, kappa, 3));
  CHECK(plain.lambda1 == doctest::Approx(r.lambda1).epsilon(1e-10));
  CHECK(plain.lambda2 < r.lambda2);
}

TEST_CASE("Simpson panels converge at fourth order") {
  // over a partial period; the full-period integral converges spectrally
  const double omega = 1.6, kappa = 1.0;
  const auto m = builtin_winfree(omega, kappa, 3);
  const int fine = 1'200'000;
  double exact = 0.0;
  for (int k = 0; k < fine; ++k) {
    const double a = 0.375 * k / fine, b = 0.375 * (k + 1) / fine;
    exact += (b - a) / 6 *
             (winfree_lambda(omega, kappa, a) + 4 * winfree_lambda(omega, kappa, 0.5 * (a + b)) +
              winfree_lambda(omega, kappa, b));
  }
  const double e1 = std::abs(build_lambda_profile(m, 128).cumulative[48] - exact);
  const double e2 = std::abs(build_lambda_profile(m, 256).cumulative[96] - exact);
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 / e2 < 20.0);
}

TEST_CASE("profile interpolation and periodic extension") {
  const double omega = 2.0, kappa = 1.0;
  const auto p = build_lambda_profile(builtin_winfree(omega, kappa, 3), 2048);
  for (double s : {0.013, 0.25, 0.4999, 0.87}) {
    CHECK(p.value_at(s) == doctest::Approx(winfree_lambda(omega, kappa, s)).epsilon(1e-8));
    CHECK(p.cumulative_at(s + 1.0) == doctest::Approx(p.cumulative_at(s) + p.integral()).epsilon(1e-12));
    CHECK(p.cumulative_at(s - 2.0) == doctest::Approx(p.cumulative_at(s) - 2 * p.integral()).epsilon(1e-12));
  }
  CHECK(p.cumulative_at(0.0) == 0.0);
}

TEST_CASE("|Lambda| <= L / alpha") {
  for (const auto& m : {builtin_winfree(1.4, 1.0, 3), builtin_winfree(4.0, 1.5, 3),
                        builtin_kuramoto(0.7, 0.9, 3)}) {
    const auto r = check_hypotheses(m);
    const auto p = build_lambda_profile(m, 1024);
    for (double v : p.values) CHECK(std::abs(v) <= r.l_total / r.alpha);
  }
}

TEST_CASE("kappa = 0 violates (H*) only") {
  const auto r = check_hypotheses(builtin_kuramoto(1.0, 0.0, 4));
  CHECK(r.holds_h);
  CHECK_FALSE(r.holds_hstar);
  CHECK(std::abs(r.lambda_integral) < 1e-15);
}

TEST_CASE("unnormalized input is normalized first") {
  const auto raw = make_trig_model(
      4, 1.0, {{0.2, TrigFn::sin, 1, TrigFn::cos, 1}, {-0.2, TrigFn::cos, 1, TrigFn::sin, 1}});
  const auto r = check_hypotheses(raw);
  CHECK(r.lambda_integral == doctest::Approx(-kTwoPi * 0.2).epsilon(1e-12));
  CHECK_THROWS_AS(compute_alpha(raw), std::invalid_argument);
}

TEST_CASE("profile errors") {
  CHECK_THROWS_AS(build_lambda_profile(builtin_winfree(1.0, 1.0, 3), 256), HypothesisError);
  CHECK_THROWS_AS(build_lambda_profile(builtin_kuramoto(1.0, 0.2, 3), 7), std::invalid_argument);
}

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "mfsync/model.hpp"
#include "mfsync/numerics.hpp"

using namespace mfsync;

namespace {

// normalized closed forms, written out independently of the trig-term machinery
double kuramoto_ref(double omega, double kappa, const std::vector<double>& y, double z) {
  double s = 0.0;
  for (double v : y) s += std::sin(kTwoPi * (v - z));
  return (omega + kappa * s / y.size()) / kTwoPi;
}

double winfree_ref(double omega, double kappa, const std::vector<double>& y, double z) {
  double s = 0.0;
  for (double v : y) s += 1.0 + std::cos(kTwoPi * v);
  return (omega - kappa * s / y.size() * std::sin(kTwoPi * z)) / kTwoPi;
}

std::vector<double> random_point(std::mt19937_64& rng, int n, double spread = 1.0) {
  const double base = uniform(rng, -3.0, 3.0);
  std::vector<double> y(n);
  for (auto& v : y) v = base + spread * uniform01(rng);
  return y;
}

}  // namespace

TEST_CASE("built-ins match their closed forms") {
  std::mt19937_64 rng(3);
  const auto ku = builtin_kuramoto(1.3, 0.4, 6);
  const auto wi = builtin_winfree(2.0, 0.7, 6);
  CHECK(ku.period_normalized);
  CHECK(ku.period == 1.0);
  for (int k = 0; k < 50; ++k) {
    const auto y = random_point(rng, 6);
    const double z = uniform(rng, -2.0, 2.0);
    CHECK(ku.f(y, z) == doctest::Approx(kuramoto_ref(1.3, 0.4, y, z)).epsilon(1e-13));
    CHECK(wi.f(y, z) == doctest::Approx(winfree_ref(2.0, 0.7, y, z)).epsilon(1e-13));
  }
}

TEST_CASE("d_z F agrees with a central difference") {
  std::mt19937_64 rng(5);
  const double h = 1e-5;
  for (const auto& m : {builtin_kuramoto(1.0, 0.5, 4), builtin_winfree(2.0, 1.0, 4)}) {
    for (int k = 0; k < 20; ++k) {
      const auto y = random_point(rng, 4);
      const double z = uniform(rng, 0.0, 1.0);
      const double fd = (m.f(y, z + h) - m.f(y, z - h)) / (2 * h);
      CHECK(m.df_z(y, z) == doctest::Approx(fd).epsilon(1e-7));
    }
  }
}

TEST_CASE("batch field equals pointwise evaluation, also when aliased") {
  std::mt19937_64 rng(7);
  const auto m = builtin_winfree(1.7, 0.9, 5);
  const auto y = random_point(rng, 5);
  std::vector<double> zs{0.1, 0.35, -0.8};
  std::vector<double> out(zs.size());
  m.field(y, zs, out);
  for (std::size_t i = 0; i < zs.size(); ++i) CHECK(out[i] == doctest::Approx(m.f(y, zs[i])));

  std::vector<double> own(y.size());
  m.field(y, y, own);
  for (std::size_t i = 0; i < y.size(); ++i) CHECK(own[i] == doctest::Approx(m.f(y, y[i])));
}

TEST_CASE("diagonal periodicity") {
  CHECK(periodicity_defect(builtin_kuramoto(1.0, 0.2, 5)) < 1e-13);
  CHECK(periodicity_defect(builtin_winfree(2.0, 1.0, 5)) < 1e-13);
  // the raw model is checked against its own period 2 pi
  const auto raw = make_trig_model(3, 1.0, {{0.5, TrigFn::sin, 1, TrigFn::cos, 1}});
  CHECK(raw.period == doctest::Approx(kTwoPi));
  CHECK(periodicity_defect(raw) < 1e-12);

  ModelSpec drift;
  drift.n = 2;
  drift.period = 1.0;
  drift.period_normalized = true;
  drift.eval_f = [](std::span<const double>, double z) { return 1.0 + 0.1 * z; };
  drift.eval_df_z = [](std::span<const double>, double) { return 0.1; };
  CHECK(periodicity_defect(drift) == doctest::Approx(0.1));
}

TEST_CASE("normalization scales bounds as (F/T, dF, T d2F)") {
  const double omega = 1.5, kappa = 0.3;
  const auto b = *builtin_kuramoto(omega, kappa, 4).norm_bounds;
  CHECK(b.f == doctest::Approx((omega + kappa) / kTwoPi));
  CHECK(b.df == doctest::Approx(kappa));
  CHECK(b.d2f == doctest::Approx(kTwoPi * kappa));

  const auto w = *builtin_winfree(2.0, 1.0, 4).norm_bounds;
  CHECK(w.f == doctest::Approx(4.0 / kTwoPi));
  CHECK(w.df == doctest::Approx(2.0));
  CHECK(w.d2f == doctest::Approx(kTwoPi * 2.0));

  // generic route: normalize F(Y, z) = 1 + 0.2 sin(y1 - z) by hand
  const auto raw = make_trig_model(2, 1.0,
                                   {{0.2, TrigFn::sin, 1, TrigFn::cos, 1},
                                    {-0.2, TrigFn::cos, 1, TrigFn::sin, 1}});
  const auto norm = normalize_period(raw, kTwoPi);
  const std::vector<double> y{0.1, 0.3};
  const std::vector<double> yt{0.1 * kTwoPi, 0.3 * kTwoPi};
  CHECK(norm.f(y, 0.7) == doctest::Approx(raw.f(yt, 0.7 * kTwoPi) / kTwoPi));
  CHECK(norm.df_z(y, 0.7) == doctest::Approx(raw.df_z(yt, 0.7 * kTwoPi)));
}

TEST_CASE("normalization preserves the sign of F") {
  std::mt19937_64 rng(9);
  const auto raw = make_trig_model(3, 0.2, {{1.0, TrigFn::one, 0, TrigFn::sin, 1}});
  const auto norm = normalize_period(raw, kTwoPi);
  for (int k = 0; k < 40; ++k) {
    const auto y = random_point(rng, 3);
    const double z = uniform(rng, 0.0, 1.0);
    const double a = raw.f(std::vector<double>{y[0] * kTwoPi, y[1] * kTwoPi, y[2] * kTwoPi}, z * kTwoPi);
    CHECK((a > 0) == (norm.f(y, z) > 0));
  }
}

TEST_CASE("custom terms reproduce the Kuramoto built-in") {
  const auto custom = normalize_period(make_trig_model(
      4, 1.0, {{0.2, TrigFn::sin, 1, TrigFn::cos, 1}, {-0.2, TrigFn::cos, 1, TrigFn::sin, 1}}));
  const auto ku = builtin_kuramoto(1.0, 0.2, 4);
  std::mt19937_64 rng(11);
  for (int k = 0; k < 20; ++k) {
    const auto y = random_point(rng, 4);
    const double z = uniform01(rng);
    CHECK(custom.f(y, z) == doctest::Approx(ku.f(y, z)).epsilon(1e-14));
  }
}

TEST_CASE("sampled norms never exceed the analytic bounds and come close") {
  SlabSampling s;
  s.grid = 6;
  for (const auto& m : {builtin_kuramoto(1.0, 0.2, 2), builtin_winfree(2.0, 1.0, 2)}) {
    const NormBounds a = *m.norm_bounds;
    const NormBounds e = sampled_norms(m, s);
    CHECK(e.f <= a.f * (1 + 1e-6));
    CHECK(e.df <= a.df * (1 + 1e-6));
    CHECK(e.d2f <= a.d2f * (1 + 1e-3));
    CHECK(e.f >= 0.8 * a.f);
    CHECK(e.df >= 0.3 * a.df);
  }
}

TEST_CASE("slab sampling: tensor grid below the cap, seeded random above") {
  SlabSampling s;
  s.grid = 4;
  int count = 0;
  for_each_slab_point(3, s, [&](std::span<const double> p) {
    ++count;
    const auto [lo, hi] = std::minmax_element(p.begin(), p.end());
    CHECK(*hi - *lo <= 1.0 + 1e-15);
  });
  CHECK(count == 256);

  s.max_points = 100;
  std::vector<double> first, second;
  for_each_slab_point(3, s, [&](std::span<const double> p) { first.push_back(p[0]); });
  for_each_slab_point(3, s, [&](std::span<const double> p) { second.push_back(p[0]); });
  CHECK(first.size() == 100);
  CHECK(first == second);
}

TEST_CASE("model parameters are validated") {
  CHECK_THROWS_AS(builtin_kuramoto(-1.0, 0.2, 3), std::invalid_argument);
  CHECK_THROWS_AS(builtin_winfree(1.0, -0.1, 3), std::invalid_argument);
  CHECK_THROWS_AS(builtin_kuramoto(1.0, 0.2, 1), std::invalid_argument);
  CHECK_NOTHROW(builtin_kuramoto(1.0, 0.0, 3));
}

TEST_CASE("perturbations") {
  SUBCASE("trig has norm a and is periodic for integer modes") {
    const auto p = PerturbationSpec::random_trigonometric(4, 0.01, 1.0, 42);
    CHECK(norm_h(p) == doctest::Approx(0.01));
    CHECK(p.periodic());
    std::mt19937_64 rng(1);
    for (int k = 0; k < 20; ++k) {
      auto y = random_point(rng, 4);
      const auto h0 = p.eval_h(y);
      for (auto& v : y) v += 1.0;
      const auto h1 = p.eval_h(y);
      for (int i = 0; i < 4; ++i) {
        CHECK(h1[i] == doctest::Approx(h0[i]).epsilon(1e-12));
        CHECK(std::abs(h0[i]) <= 0.01 + 1e-15);
      }
    }
    CHECK_FALSE(PerturbationSpec::random_trigonometric(4, 0.01, 0.5, 42).periodic());
  }
  SUBCASE("trig values follow a sin(2 pi m mean(Y) + phi_i)") {
    const auto p = PerturbationSpec::trigonometric(0.3, 2.0, {0.1, 1.2});
    const std::vector<double> y{0.15, 0.4};
    const auto h = p.eval_h(y);
    CHECK(h[0] == doctest::Approx(0.3 * std::sin(kTwoPi * 2.0 * 0.275 + 0.1)));
    CHECK(h[1] == doctest::Approx(0.3 * std::sin(kTwoPi * 2.0 * 0.275 + 1.2)));
  }
  SUBCASE("detunes are mean-free with the requested peak") {
    const auto p = PerturbationSpec::random_detune(6, 0.02, 7);
    double sum = 0.0, peak = 0.0;
    for (double v : p.detune()) sum += v, peak = std::max(peak, std::abs(v));
    CHECK(std::abs(sum) < 1e-15);
    CHECK(peak == doctest::Approx(0.02));
    CHECK(norm_h(p) == doctest::Approx(0.02));
    CHECK(p.periodic());
  }
  SUBCASE("same seed, same perturbation") {
    const auto a = PerturbationSpec::random_trigonometric(5, 0.1, 1.0, 9);
    const auto b = PerturbationSpec::random_trigonometric(5, 0.1, 1.0, 9);
    CHECK(a.phases() == b.phases());
  }
  CHECK(norm_h(PerturbationSpec::zero(3)) == 0.0);
}

#include "mfsync/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mfsync/numerics.hpp"

namespace mfsync {

namespace {

// (1 - e^-lambda1) / e^lambda2, the factor shared by d_star and the radius.
double q_factor(double lambda1, double lambda2) {
  return -std::expm1(-lambda1) * std::exp(-lambda2);
}

}  // namespace

double DispersionParams::balance_residual() const {
  return c * std::exp(lambda2) / (-std::expm1(-lambda1)) - d;
}

Eta compute_eta(const HypothesisReport& report) {
  if (!report.holds_h || !report.holds_hstar) {
    throw HypothesisError("eta needs both (H) and (H*) to hold: " + report.diagnostic);
  }
  const double L = report.l_total;
  const double a = report.alpha;
  return Eta{1.0 / L, 2.0 + L / a, a / L};
}

double compute_dstar(const Eta& eta, double lambda1, double lambda2) {
  if (!(lambda1 > 0.0)) throw HypothesisError("d_star needs lambda1 > 0, i.e. (H*)");
  const double q = q_factor(lambda1, lambda2);
  return 0.5 * eta.e3 * q / (q + eta.e2);
}

double compute_radius(const Eta& eta, double lambda1, double lambda2, double d) {
  const double d_star = compute_dstar(eta, lambda1, lambda2);
  if (!(d > 0.0) || d > d_star * (1.0 + 1e-12)) {
    throw std::invalid_argument("dispersion bound must lie in (0, d_star]");
  }
  const double q = q_factor(lambda1, lambda2);
  return d / eta.e1 * (eta.e3 * q - (q + eta.e2) * d);
}

double optimal_radius_d(const Eta& eta, double lambda1, double lambda2) {
  const double d_star = compute_dstar(eta, lambda1, lambda2);
  const auto [arg, neg_r] = minimize_1d(
      [&](double d) { return -compute_radius(eta, lambda1, lambda2, d); }, 0.0, d_star);
  // radius(d) is a concave parabola; keep the endpoint when it does at least as well.
  if (-neg_r <= compute_radius(eta, lambda1, lambda2, d_star)) return d_star;
  return arg;
}

DispersionParams make_dispersion_params(const HypothesisReport& report, std::optional<double> d) {
  DispersionParams p;
  p.eta = compute_eta(report);
  p.lambda1 = report.lambda1;
  p.lambda2 = report.lambda2;
  p.d_star = compute_dstar(p.eta, p.lambda1, p.lambda2);
  p.d = d.value_or(p.d_star);
  p.radius = compute_radius(p.eta, p.lambda1, p.lambda2, p.d);
  p.c = (p.eta.e1 * p.radius + p.eta.e2 * p.d * p.d) / (p.eta.e3 - p.d);
  return p;
}

DispersionCurve::DispersionCurve(DispersionParams params, std::vector<double> samples,
                                 std::vector<double> lambda_nodes)
    : params_(params), samples_(std::move(samples)), lambda_(std::move(lambda_nodes)) {
  if (samples_.size() < 3 || samples_.size() != lambda_.size()) {
    throw std::invalid_argument("curve samples and profile nodes must align");
  }
  slopes_.resize(samples_.size());
  for (std::size_t k = 0; k < samples_.size(); ++k) {
    slopes_[k] = params_.c + lambda_[k] * samples_[k];
  }
}

double DispersionCurve::value(double s) const {
  const int m = panels();
  const double x = wrap_unit(s) * m;
  const int k = std::min(static_cast<int>(x), m - 1);
  const double u = x - k;
  const double h = 1.0 / m;
  return hermite(samples_[k], slopes_[k] * h, samples_[k + 1], slopes_[k + 1] * h, u);
}

double DispersionCurve::slope(double s) const {
  const int m = panels();
  const double x = wrap_unit(s) * m;
  const int k = std::min(static_cast<int>(x), m - 1);
  const double u = x - k;
  const double h = 1.0 / m;
  return hermite_slope(samples_[k], slopes_[k] * h, samples_[k + 1], slopes_[k + 1] * h, u) *
         m;
}

double DispersionCurve::max() const { return *std::max_element(samples_.begin(), samples_.end()); }

double DispersionCurve::min() const { return *std::min_element(samples_.begin(), samples_.end()); }

DispersionCurve build_curve(const LambdaProfile& profile, const DispersionParams& params) {
  const int m = profile.panels;
  const double h = profile.step();
  const auto& I = profile.cumulative;
  const double i1 = profile.integral();
  if (!(i1 < 0.0)) throw HypothesisError("dispersion curve needs int_0^1 Lambda < 0");

  // E(s) = int_0^s e^{-I(t)} dt by Simpson, with I at panel midpoints from the
  // Hermite interpolant of I (slopes Lambda).
  std::vector<double> e_cum(m + 1, 0.0);
  for (int k = 0; k < m; ++k) {
    const double i_mid =
        0.5 * (I[k] + I[k + 1]) + h / 8.0 * (profile.values[k] - profile.values[k + 1]);
    e_cum[k + 1] = e_cum[k] + h / 6.0 *
                                  (std::exp(-I[k]) + 4.0 * std::exp(-i_mid) + std::exp(-I[k + 1]));
  }
  const double e1 = e_cum[m];
  const double denom = -std::expm1(i1);

  // Delta(s) = c / (1 - e^{I(1)}) * int_s^{1+s} e^{I(1) + I(s) - I(t)} dt, where
  // I(t) = I(1) + I(t - 1) on [1, 1 + s].
  std::vector<double> samples(m + 1);
  for (int k = 0; k <= m; ++k) {
    const double inner = std::exp(i1 + I[k]) * (e1 - e_cum[k]) + std::exp(I[k]) * e_cum[k];
    samples[k] = params.c * inner / denom;
    if (!(samples[k] > 0.0) || !std::isfinite(samples[k])) {
      throw std::runtime_error("dispersion curve sample is not positive; quadrature failed");
    }
  }
  return DispersionCurve(params, std::move(samples), profile.values);
}

double max_ode_residual(const DispersionCurve& curve) {
  const auto& d = curve.samples();
  const auto& lam = curve.lambda_nodes();
  const int m = curve.panels();
  const double h = 1.0 / m;
  // Node m duplicates node 0; index periodically over 0..m-1.
  auto at = [&](int k) { return d[((k % m) + m) % m]; };
  double worst = 0.0;
  for (int k = 0; k < m; ++k) {
    const double deriv = (-at(k + 2) + 8.0 * at(k + 1) - 8.0 * at(k - 1) + at(k - 2)) / (12.0 * h);
    worst = std::max(worst, std::abs(deriv - curve.params().c - lam[k] * d[k]));
  }
  return worst;
}

std::optional<Membership> membership(std::span<const double> x, const DispersionCurve& curve) {
  if (x.empty()) return std::nullopt;
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double d = curve.params().d;
  const double lo = *hi_it - d;
  const double hi = *lo_it + d;
  if (!(lo < hi)) return std::nullopt;

  auto margin = [&](double nu) {
    double worst = 0.0;
    for (double xi : x) worst = std::max(worst, std::abs(xi - nu));
    return curve.value(nu) - worst;
  };

  constexpr int kScan = 512;
  int best = 0;
  double best_margin = -std::numeric_limits<double>::infinity();
  const double step = (hi - lo) / kScan;
  for (int k = 0; k <= kScan; ++k) {
    const double g = margin(lo + k * step);
    if (g > best_margin) {
      best_margin = g;
      best = k;
    }
  }
  double nu = lo + best * step;
  const double a = lo + std::max(0, best - 1) * step;
  const double b = lo + std::min(kScan, best + 1) * step;
  const auto [arg, neg] = minimize_1d([&](double v) { return -margin(v); }, a, b);
  if (-neg > best_margin) {
    best_margin = -neg;
    nu = arg;
  }
  if (!(best_margin > 0.0)) return std::nullopt;
  return Membership{nu, best_margin};
}

TubePoint random_tube_point(const DispersionCurve& curve, int n, double fraction,
                            std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  TubePoint tp;
  tp.nu = uniform01(rng);
  const double width = fraction * curve.value(tp.nu);
  tp.x.resize(n);
  for (auto& xi : tp.x) xi = tp.nu + width * uniform(rng, -1.0, 1.0);
  return tp;
}

}  // namespace mfsync

#include "mfsync/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mfsync/numerics.hpp"

namespace mfsync {

namespace {

void require_normalized(const ModelSpec& model) {
  if (!model.period_normalized) {
    throw std::invalid_argument("model must be period-normalized (see normalize_period)");
  }
}

// Locates the panel holding s in [0, 1] and the local coordinate u in [0, 1].
std::pair<int, double> locate(const LambdaProfile& p, double s) {
  const double x = s * p.panels;
  int k = static_cast<int>(std::floor(x));
  k = std::clamp(k, 0, p.panels - 1);
  return {k, x - k};
}

}  // namespace

double LambdaProfile::cumulative_at(double s) const {
  const double whole = std::floor(s);
  double frac = s - whole;
  if (frac >= 1.0) frac = 0.0;
  const auto [k, u] = locate(*this, frac);
  const double h = step();
  const double local =
      hermite(cumulative[k], values[k] * h, cumulative[k + 1], values[k + 1] * h, u);
  return whole * integral() + local;
}

double LambdaProfile::value_at(double s) const {
  const auto [k, u] = locate(*this, wrap_unit(s));
  // Lagrange quadratic through u = 0, 1/2, 1.
  const double a = values[k];
  const double b = mid_values[k];
  const double c = values[k + 1];
  return a * (2 * u - 1) * (u - 1) + b * 4 * u * (1 - u) + c * u * (2 * u - 1);
}

double compute_alpha(const ModelSpec& model, int grid) {
  require_normalized(model);
  if (grid < 3) throw std::invalid_argument("alpha grid needs at least 3 points");
  int best = 0;
  double best_value = std::numeric_limits<double>::infinity();
  for (int k = 0; k < grid; ++k) {
    const double v = model.diagonal(static_cast<double>(k) / grid);
    if (v < best_value) {
      best_value = v;
      best = k;
    }
  }
  const double lo = static_cast<double>(best - 1) / grid;
  const double hi = static_cast<double>(best + 1) / grid;
  const auto [arg, refined] = minimize_1d([&](double s) { return model.diagonal(s); }, lo, hi);
  (void)arg;
  return std::min(best_value, refined);
}

LambdaProfile build_lambda_profile(const ModelSpec& model, int panels) {
  require_normalized(model);
  if (panels < 2 || panels % 2 != 0) {
    throw std::invalid_argument("profile panel count must be even and >= 2");
  }
  LambdaProfile p;
  p.panels = panels;
  const double h = 1.0 / panels;
  auto lambda = [&](double s) {
    const double f = model.diagonal(s);
    if (!(f > 0.0)) {
      std::ostringstream msg;
      msg << "hypothesis (H) violated: F(s1, s) = " << f << " <= 0 at s = " << s;
      throw HypothesisError(msg.str());
    }
    return model.diagonal_df_z(s) / f;
  };
  p.s.resize(panels + 1);
  p.values.resize(panels + 1);
  p.mid_values.resize(panels);
  p.cumulative.resize(panels + 1);
  for (int k = 0; k <= panels; ++k) {
    p.s[k] = k * h;
    p.values[k] = lambda(p.s[k]);
  }
  for (int k = 0; k < panels; ++k) p.mid_values[k] = lambda((k + 0.5) * h);
  p.cumulative[0] = 0.0;
  for (int k = 0; k < panels; ++k) {
    p.cumulative[k + 1] =
        p.cumulative[k] + h / 6.0 * (p.values[k] + 4.0 * p.mid_values[k] + p.values[k + 1]);
  }
  return p;
}

Lambdas compute_lambdas(const LambdaProfile& profile) {
  const auto& I = profile.cumulative;
  const int m = profile.panels;
  const auto max_it = std::max_element(I.begin(), I.end());
  const auto min_it = std::min_element(I.begin(), I.end());

  auto refine = [&](int k, double sign) {
    // sign = +1 refines a maximum, -1 a minimum of the Hermite interpolant.
    const double grid_value = I[k];
    const double lo = std::max(0, k - 1) * profile.step();
    const double hi = std::min(m, k + 1) * profile.step();
    const auto [arg, v] =
        minimize_1d([&](double s) { return -sign * profile.cumulative_at(s); }, lo, hi);
    (void)arg;
    const double refined = -sign * v;
    return sign > 0 ? std::max(grid_value, refined) : std::min(grid_value, refined);
  };

  const double i_max = refine(static_cast<int>(max_it - I.begin()), 1.0);
  const double i_min = refine(static_cast<int>(min_it - I.begin()), -1.0);
  Lambdas out;
  out.lambda1 = -profile.integral();
  // int_t^{1+s} Lambda = I(1) + I(s) - I(t) for s, t in [0, 1].
  out.lambda2 = profile.integral() + i_max - i_min;
  return out;
}

HypothesisReport check_hypotheses(const ModelSpec& input, const HypothesisOptions& options) {
  const ModelSpec model = input.period_normalized ? input : normalize_period(input);
  HypothesisReport r;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  r.alpha = compute_alpha(model, options.alpha_grid);
  bool norms_finite = true;
  try {
    r.l_components = norm_bounds(model, options.slab);
  } catch (const std::invalid_argument&) {
    norms_finite = false;
    r.l_components = {std::numeric_limits<double>::infinity(), 0.0, 0.0};
  }
  r.l_total = r.l_components.total();
  norms_finite = norms_finite && std::isfinite(r.l_total);
  r.periodicity_defect = periodicity_defect(model, options.periodicity_samples);
  const double periodic_tol = options.periodicity_tol * (1.0 + (norms_finite ? r.l_components.f : 0.0));
  const bool periodic = r.periodicity_defect <= periodic_tol;

  std::ostringstream diag;
  if (!(r.alpha > 0.0)) diag << "alpha = " << r.alpha << " <= 0; ";
  if (!norms_finite) diag << "slab norms not finite; ";
  if (!periodic) diag << "F is not 1-periodic (defect " << r.periodicity_defect << "); ";
  r.holds_h = r.alpha > 0.0 && norms_finite && periodic;

  if (r.alpha > 0.0) {
    const LambdaProfile profile = build_lambda_profile(model, options.profile_panels);
    const Lambdas lambdas = compute_lambdas(profile);
    r.lambda_integral = profile.integral();
    r.lambda1 = lambdas.lambda1;
    r.lambda2 = lambdas.lambda2;
    r.holds_hstar = r.lambda_integral < -options.sign_tol;
    if (!r.holds_hstar) diag << "int_0^1 Lambda = " << r.lambda_integral << " is not negative; ";
  } else {
    r.lambda_integral = nan;
    r.lambda1 = nan;
    r.lambda2 = nan;
    r.holds_hstar = false;
  }
  r.diagnostic = diag.str();
  if (!r.diagnostic.empty()) r.diagnostic.resize(r.diagnostic.size() - 2);
  return r;
}

}  // namespace mfsync

#include "mfsync/sync_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfsync {

namespace {

bool same_tube(const DispersionParams& a, const DispersionParams& b) {
  return a.d == b.d && a.radius == b.radius && a.c == b.c;
}

}  // namespace

SyncVerdict assess(const Trajectory& trajectory, const DispersionCurve& curve) {
  if (!trajectory.tube || !same_tube(*trajectory.tube, curve.params())) {
    throw std::invalid_argument("trajectory was not integrated against this dispersion curve");
  }
  if (trajectory.delta.size() != trajectory.steps.size() ||
      trajectory.bound.size() != trajectory.steps.size() ||
      trajectory.velocity.size() != trajectory.steps.size()) {
    throw std::invalid_argument("trajectory arrays are misaligned");
  }

  SyncVerdict v;
  v.min_margin = std::numeric_limits<double>::infinity();
  v.min_velocity = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < trajectory.steps.size(); ++k) {
    const auto& x = trajectory.steps[k].x;
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    v.max_spread = std::max(v.max_spread, *hi - *lo);
    const double margin = trajectory.bound[k] - trajectory.delta[k];
    v.min_margin = std::min(v.min_margin, margin);
    if (!(margin > kStrictMargin)) ++v.violations;
    v.min_velocity = std::min(v.min_velocity, trajectory.velocity[k]);
  }
  const auto& sum = trajectory.summary;
  v.min_margin = std::min(v.min_margin, sum.min_margin);
  v.min_velocity = std::min(v.min_velocity, sum.min_velocity);
  v.max_spread = std::max(v.max_spread, sum.max_spread);
  v.violations = std::max(v.violations, sum.violations);
  v.steps_checked = std::max(sum.steps, trajectory.steps.size());

  v.invariant = v.min_margin > kStrictMargin && v.violations == 0;
  v.dynamical = v.min_velocity > 0.0;
  v.spread_ok = v.max_spread < 2.0 * curve.params().d;
  return v;
}

bool verdict_expected(const HypothesisReport& report, double h_norm, double radius,
                      bool initial_member) {
  return report.holds_h && report.holds_hstar && h_norm < radius && initial_member;
}

}  // namespace mfsync

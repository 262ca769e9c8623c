#pragma once

#include <cstddef>

#include "mfsync/dispersion.hpp"
#include "mfsync/integrator.hpp"

namespace mfsync {

struct SyncVerdict {
  /// delta(t) < Delta_r(mu(t)) at every step.
  bool invariant = false;
  double min_margin = 0.0;
  /// min over steps of min_i dx_i/dt > 0.
  bool dynamical = false;
  double min_velocity = 0.0;
  double max_spread = 0.0;
  /// max_spread < 2 D.
  bool spread_ok = false;
  std::size_t steps_checked = 0;
  std::size_t violations = 0;

  [[nodiscard]] bool all_hold() const { return invariant && dynamical && spread_ok; }
};

/// Verdicts from the recorded arrays merged with the trajectory's running
/// extrema, so unrecorded steps count too. Throws when the trajectory was
/// checked against a different tube.
SyncVerdict assess(const Trajectory& trajectory, const DispersionCurve& curve);

/// Whether Main Result I promises invariance for this run: both hypotheses,
/// ||H||_B < r and x0 in C_r.
bool verdict_expected(const HypothesisReport& report, double h_norm, double radius,
                      bool initial_member);

}  // namespace mfsync

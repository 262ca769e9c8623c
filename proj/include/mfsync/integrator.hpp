#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "mfsync/dispersion.hpp"
#include "mfsync/model.hpp"

namespace mfsync {

/// Strict inequalities such as delta < Delta_r(mu) are decided with this margin.
inline constexpr double kStrictMargin = 1e-12;

/// Raised on non-finite states or when the companion solution stalls.
class IntegrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Phases x together with the companion solution mu of dmu/dt = F(X(t), mu).
struct JointState {
  double t = 0.0;
  std::vector<double> x;
  double mu = 0.0;
};

/// dx_i/dt = F(X, x_i) + H_i(X) joined with dmu/dt = F(X, mu).
///
/// The packed layout used by the stepping routines is y = (x_1..x_N, mu).
class JointSystem {
 public:
  JointSystem(ModelSpec model, PerturbationSpec perturbation);

  [[nodiscard]] int n() const { return model_.n; }
  [[nodiscard]] const ModelSpec& model() const { return model_; }
  [[nodiscard]] const PerturbationSpec& perturbation() const { return perturbation_; }

  void rhs(std::span<const double> y, std::span<double> dy) const;
  [[nodiscard]] std::vector<double> rhs(const JointState& state) const;

 private:
  ModelSpec model_;
  PerturbationSpec perturbation_;
  mutable std::vector<double> h_buf_;
};

/// Default fixed step min(0.01 / L, 0.001 / alpha).
double default_step(double alpha, double l_total);

/// Running extrema over every integrated step, recorded or not.
struct TubeSummary {
  std::size_t steps = 0;
  std::size_t violations = 0;
  double min_margin = std::numeric_limits<double>::infinity();
  double min_velocity = std::numeric_limits<double>::infinity();
  double max_spread = 0.0;
  double max_delta = 0.0;
  std::optional<double> first_violation_t;
};

struct Trajectory {
  std::vector<JointState> steps;
  /// delta = max_i |x_i - mu| per recorded step.
  std::vector<double> delta;
  /// Delta_r(mu) per recorded step; NaN without a tube.
  std::vector<double> bound;
  /// min_i dx_i/dt per recorded step.
  std::vector<double> velocity;
  /// Dispersion parameters of the tube the run was checked against.
  std::optional<DispersionParams> tube;
  TubeSummary summary;
  bool stopped_on_violation = false;
};

struct IntegrateOptions {
  double t_end = 0.0;
  double h = 0.0;
  /// Tube for delta < Delta_r(mu) checks; not owned.
  const DispersionCurve* tube = nullptr;
  /// Keep every k-th step (the first and last step are always kept).
  std::size_t record_stride = 1;
  /// Stop at the first tube violation.
  bool strict = false;
};

/// Classic fourth-order Runge-Kutta from t = 0 with x(0) = x0, mu(0) = nu0.
Trajectory integrate(const JointSystem& system, std::span<const double> x0, double nu0,
                     const IntegrateOptions& options);

/// State at time t: uniform steps h, then one shorter step to land on t.
JointState flow_to(const JointSystem& system, std::span<const double> x0, double mu0, double t,
                   double h);

struct Crossing {
  double t = 0.0;
  JointState state;
};

/// Given a step pair bracketing mu = level, bisects on the cubic Hermite
/// interpolant of mu and returns the interpolated state at the crossing.
Crossing refine_crossing(const JointState& a, std::span<const double> da, const JointState& b,
                         std::span<const double> db, double level);

/// Integrates until mu first reaches `level`, or returns nothing by t_max.
/// With a tube, a step inside it where dmu/dt <= 0 raises IntegrationError.
std::optional<Crossing> cross_time(const JointSystem& system, std::span<const double> x0,
                                   double mu0, double level, double t_max, double h,
                                   const DispersionCurve* tube = nullptr);

}  // namespace mfsync

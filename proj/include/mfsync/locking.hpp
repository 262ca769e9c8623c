#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mfsync/dispersion.hpp"
#include "mfsync/integrator.hpp"

namespace mfsync {

/// Raised when the return map cannot be evaluated, e.g. mu never reaches the
/// next level.
class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// What the return map needs: the flow, the tube defining Sigma, and the
/// constants bounding the return time.
struct LockContext {
  const JointSystem& system;
  const DispersionCurve& curve;
  double alpha = 0.0;
  double l_total = 0.0;
  double h = 0.0;
};

struct PoincareResult {
  std::vector<double> p;
  double theta = 0.0;
  /// max_i |p_i - mu0| < Delta_r(mu0).
  bool in_sigma = false;
  /// 1/L < theta < 2/alpha.
  bool theta_in_bounds = false;
};

/// Starts mu at mu0, integrates until mu = mu0 + 1 and returns
/// P(x) = X(theta) - 1 with the return time theta. With mu0 = 0 this is the
/// return map on Sigma = {max_i |x_i| < Delta_r(0)}.
PoincareResult poincare(const LockContext& ctx, std::span<const double> x, double mu0 = 0.0);

struct LockOptions {
  double tol = 1e-10;
  int max_iter = 200;
  int newton_max_iter = 40;
  double fd_step = 1e-6;
  /// Psi samples per period.
  int psi_samples = 200;
};

struct LockResult {
  bool converged = false;
  /// "picard" or "newton".
  std::string method;
  int iterations = 0;
  std::string message;
  std::vector<double> x_star;
  double theta_star = 0.0;
  double rho = 0.0;
  /// ||P(x*) - x*||_inf.
  double residual = 0.0;
  /// Uniform grid over [0, 2 theta*].
  std::vector<double> psi_grid;
  /// psi_samples[k][i] = x_i(s_k) - s_k / theta*.
  std::vector<std::vector<double>> psi_samples;
  /// max_k |Psi(s_k + theta*) - Psi(s_k)|.
  double periodicity_residual = 0.0;
  /// Return time of every map evaluation made during the search.
  std::vector<double> thetas;
  bool theta_bounds_ok = true;
  bool sigma_ok = true;
};

/// Picard iteration x <- P(x) from x = 0; falls back to damped
/// finite-difference Newton on P(x) - x when Picard stalls.
LockResult find_fixed_point(const LockContext& ctx, const LockOptions& options = {});

struct LockedState {
  /// Uniform grid over one period [0, theta*].
  std::vector<double> s;
  std::vector<std::vector<double>> psi;
  double rho = 0.0;
  double wrap_residual = 0.0;
};

/// Samples Psi(s) = X(s) - s/theta* on one period and checks Psi(s + theta*) = Psi(s).
LockedState extract_locked_state(const LockContext& ctx, const LockResult& result, int samples);

/// max over `count` times t in [0, 2 theta*) of |X(t + theta*) - X(t) - 1|.
double orbit_shift_defect(const LockContext& ctx, const LockResult& result, int count = 10);

/// max_i |(x_i(T) - x_i(0)) / T - rho| with T = periods * theta*.
double frequency_error(const LockContext& ctx, const LockResult& result, int periods = 100);

}  // namespace mfsync

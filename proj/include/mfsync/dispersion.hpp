#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mfsync/hypotheses.hpp"

namespace mfsync {

/// eta = (1/L, 2 + L/alpha, alpha/L).
struct Eta {
  double e1 = 0.0;
  double e2 = 0.0;
  double e3 = 0.0;
};

struct DispersionParams {
  Eta eta;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  /// Largest admissible dispersion bound.
  double d_star = 0.0;
  /// Chosen dispersion bound, 0 < d <= d_star.
  double d = 0.0;
  /// Perturbation budget: the tube is invariant for every ||H||_B < radius.
  double radius = 0.0;
  /// Inhomogeneous coefficient (eta1 r + eta2 d^2) / (eta3 - d) of the comparison ODE.
  double c = 0.0;

  /// c e^lambda2 / (1 - e^-lambda1) - d; zero when radius was derived from d.
  [[nodiscard]] double balance_residual() const;
};

Eta compute_eta(const HypothesisReport& report);
double compute_dstar(const Eta& eta, double lambda1, double lambda2);
double compute_radius(const Eta& eta, double lambda1, double lambda2, double d);
/// argmax of radius(d) over (0, d_star].
double optimal_radius_d(const Eta& eta, double lambda1, double lambda2);

/// Assembles the parameters from a report with both hypotheses holding.
/// Without `d`, the bound defaults to d_star.
DispersionParams make_dispersion_params(const HypothesisReport& report,
                                        std::optional<double> d = std::nullopt);

/// The positive 1-periodic solution of Delta' = c + Lambda(s) Delta sampled on
/// the profile grid, with cubic Hermite interpolation in between.
class DispersionCurve {
 public:
  DispersionCurve() = default;
  DispersionCurve(DispersionParams params, std::vector<double> samples,
                  std::vector<double> lambda_nodes);

  [[nodiscard]] const DispersionParams& params() const { return params_; }
  [[nodiscard]] const std::vector<double>& samples() const { return samples_; }
  [[nodiscard]] const std::vector<double>& lambda_nodes() const { return lambda_; }
  [[nodiscard]] int panels() const { return static_cast<int>(samples_.size()) - 1; }

  /// Delta_r(s) for any real s (1-periodic).
  [[nodiscard]] double value(double s) const;
  [[nodiscard]] double slope(double s) const;
  [[nodiscard]] double max() const;
  [[nodiscard]] double min() const;

 private:
  DispersionParams params_;
  std::vector<double> samples_;
  std::vector<double> lambda_;
  std::vector<double> slopes_;
};

DispersionCurve build_curve(const LambdaProfile& profile, const DispersionParams& params);

/// Largest |Delta'(s_k) - c - Lambda(s_k) Delta(s_k)| over the grid nodes, with
/// Delta' from a fourth-order periodic finite difference of the samples.
double max_ode_residual(const DispersionCurve& curve);

struct Membership {
  double nu = 0.0;
  /// Delta_r(nu) - max_i |x_i - nu| > 0.
  double margin = 0.0;
};

/// Witness nu for x in C_r = {x : exists nu, max_i |x_i - nu| < Delta_r(nu)}.
std::optional<Membership> membership(std::span<const double> x, const DispersionCurve& curve);

struct TubePoint {
  std::vector<double> x;
  double nu = 0.0;
};

/// nu uniform in [0, 1), x_i = nu + fraction * Delta_r(nu) * u_i with u_i
/// uniform in [-1, 1]; the point lies in C_r whenever fraction < 1.
TubePoint random_tube_point(const DispersionCurve& curve, int n, double fraction,
                            std::uint64_t seed);

}  // namespace mfsync

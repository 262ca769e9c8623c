#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mfsync/model.hpp"

namespace mfsync {

/// Raised when an operation needs (H) or (H*) and the model violates it.
class HypothesisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Diagonal profile Lambda(s) = d_z F(s1, s) / F(s1, s) on a uniform grid of
/// [0, 1], with its running integral I(s) = int_0^s Lambda.
///
/// Each panel [s_k, s_k+1] carries a midpoint sample and is integrated with
/// Simpson's rule, so `cumulative` is exact to O(M^-4) at every node.
struct LambdaProfile {
  int panels = 0;
  std::vector<double> s;
  std::vector<double> values;
  std::vector<double> mid_values;
  std::vector<double> cumulative;

  [[nodiscard]] double step() const { return 1.0 / panels; }
  /// I(1) = int_0^1 Lambda.
  [[nodiscard]] double integral() const { return cumulative.back(); }
  /// I(s) for any real s, using I(s + 1) = I(1) + I(s).
  [[nodiscard]] double cumulative_at(double s) const;
  /// Lambda(s) by quadratic interpolation through a panel's nodes and midpoint.
  [[nodiscard]] double value_at(double s) const;
};

struct Lambdas {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
};

struct HypothesisReport {
  double alpha = 0.0;
  NormBounds l_components;
  double l_total = 0.0;
  double lambda_integral = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  bool holds_h = false;
  bool holds_hstar = false;
  /// Largest |F(Y + 1, z + 1) - F(Y, z)| observed while checking periodicity.
  double periodicity_defect = 0.0;
  /// Empty when both hypotheses hold; otherwise says which check failed.
  std::string diagnostic;
};

struct HypothesisOptions {
  int profile_panels = 2048;
  int alpha_grid = 4096;
  SlabSampling slab;
  double sign_tol = 1e-10;
  int periodicity_samples = 100;
  double periodicity_tol = 1e-10;
};

/// alpha = min over s in [0, 1] of F(s1, s) for a period-normalized model.
double compute_alpha(const ModelSpec& model, int grid = 4096);

/// Throws HypothesisError when F(s1, s) <= 0 somewhere on the grid.
LambdaProfile build_lambda_profile(const ModelSpec& model, int panels = 2048);

Lambdas compute_lambdas(const LambdaProfile& profile);

/// Normalizes the model when needed, then evaluates (H) and (H*). Failed
/// hypotheses are reported in the verdict fields, never thrown.
HypothesisReport check_hypotheses(const ModelSpec& model, const HypothesisOptions& options = {});

}  // namespace mfsync

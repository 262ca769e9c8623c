#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mfsync {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Upper bounds for the slab quasi-norms of the coupling field and its first
/// two differentials, sup over B = {max|y_i - y_j| <= 1}.
struct NormBounds {
  double f = 0.0;
  double df = 0.0;
  double d2f = 0.0;

  [[nodiscard]] double total() const { return f + df + d2f; }
};

using FieldFn = std::function<double(std::span<const double> y, double z)>;
using BatchFieldFn = std::function<void(std::span<const double> y, std::span<const double> zs,
                                        std::span<double> out)>;

/// The mean-field coupling F(Y, z) of the system dx_i/dt = F(X, x_i) + H_i(X).
///
/// `eval_field` is an optional fast path evaluating F(Y, z) for many z at a
/// fixed population state Y; when empty, `field()` loops over `eval_f`.
struct ModelSpec {
  int n = 0;
  FieldFn eval_f;
  FieldFn eval_df_z;
  BatchFieldFn eval_field;
  std::optional<NormBounds> norm_bounds;
  bool period_normalized = false;
  /// Diagonal period T: F(Y + T*1, z + T) = F(Y, z).
  double period = 1.0;
  std::string name;
  /// Optional native period-1 form, equivalent to rescaling by `period` but
  /// cheaper to evaluate; normalize_period prefers it.
  std::function<ModelSpec()> unit_period_form;

  [[nodiscard]] double f(std::span<const double> y, double z) const { return eval_f(y, z); }
  [[nodiscard]] double df_z(std::span<const double> y, double z) const { return eval_df_z(y, z); }
  void field(std::span<const double> y, std::span<const double> zs, std::span<double> out) const;

  /// F(s*1, s).
  [[nodiscard]] double diagonal(double s) const;
  /// d/dz F(s*1, z) at z = s.
  [[nodiscard]] double diagonal_df_z(double s) const;
};

enum class TrigFn { one, cos, sin };

/// One term c * (1/N) sum_j f(m y_j) * g(k z) of a trigonometric mean-field coupling.
struct TrigTerm {
  double coeff = 0.0;
  TrigFn y_fn = TrigFn::one;
  int m = 0;
  TrigFn z_fn = TrigFn::one;
  int k = 0;
};

/// F(Y, z) = omega + sum_t c_t * mean_j f_t(m_t y_j) * g_t(k_t z) in natural
/// (2*pi-periodic) units. Analytic norm bounds are derived term by term.
ModelSpec make_trig_model(int n, double omega, std::vector<TrigTerm> terms,
                          std::string name = "custom");

/// Period-normalized Winfree coupling omega - kappa * mean_j[1 + cos y_j] sin z.
ModelSpec builtin_winfree(double omega, double kappa, int n);

/// Period-normalized attractive Kuramoto coupling omega + kappa * mean_j sin(y_j - z).
ModelSpec builtin_kuramoto(double omega, double kappa, int n);

/// Rescales a T-periodic model to period 1: F~(U, u) = F(T U, T u) / T.
ModelSpec normalize_period(const ModelSpec& model, double period);
ModelSpec normalize_period(const ModelSpec& model);

/// A point base*1 + offsets of the slab B; offsets live in [0, 1]^q.
struct SlabSample {
  double base = 0.0;
  std::vector<double> offsets;

  [[nodiscard]] std::vector<double> point() const;
};

struct SlabSampling {
  /// Points per axis of the tensor grid over (base, offsets).
  int grid = 12;
  /// When grid^(q+1) exceeds this, seeded random samples are used instead.
  std::size_t max_points = 60000;
  std::uint64_t seed = 0x5eed;
};

/// Calls `visit` with every sample point of the fundamental slab domain in R^q.
void for_each_slab_point(int q, const SlabSampling& sampling,
                         const std::function<void(std::span<const double>)>& visit);

/// Analytic bounds when the model carries them, otherwise sampled suprema over
/// the fundamental slab domain times 1.05. Throws for non-normalized models
/// lacking analytic bounds.
NormBounds norm_bounds(const ModelSpec& model, const SlabSampling& sampling = {});

/// Sampled suprema without safety factor; ignores analytic bounds.
NormBounds sampled_norms(const ModelSpec& model, const SlabSampling& sampling);

/// max |F(Y + 1, z + 1) - F(Y, z)| over `samples` seeded random points.
double periodicity_defect(const ModelSpec& model, int samples = 100, std::uint64_t seed = 11);

enum class PerturbationKind { zero, detune, trig };

/// Perturbation H acting on period-normalized phases.
///
/// detune:  H_i(Y) = w_i - mean(w)
/// trig:    H_i(Y) = a * sin(2 pi m mean(Y) + phi_i)
class PerturbationSpec {
 public:
  PerturbationSpec() = default;

  static PerturbationSpec zero(int n);
  static PerturbationSpec constant_detune(std::vector<double> values);
  static PerturbationSpec trigonometric(double amplitude, double mode, std::vector<double> phases);
  /// Phases drawn uniformly from [0, 2pi) with the given seed.
  static PerturbationSpec random_trigonometric(int n, double amplitude, double mode,
                                               std::uint64_t seed);
  /// Mean-removed detunes rescaled so that max |w_i| = amplitude.
  static PerturbationSpec random_detune(int n, double amplitude, std::uint64_t seed);

  [[nodiscard]] PerturbationKind kind() const { return kind_; }
  [[nodiscard]] int n() const { return n_; }
  [[nodiscard]] const std::vector<double>& detune() const { return detune_; }
  [[nodiscard]] double amplitude() const { return amplitude_; }
  [[nodiscard]] double mode() const { return mode_; }
  [[nodiscard]] const std::vector<double>& phases() const { return phases_; }

  /// Writes H(Y) into out.
  void eval_h(std::span<const double> y, std::span<double> out) const;
  [[nodiscard]] std::vector<double> eval_h(std::span<const double> y) const;

  /// True when H(Y + 1) = H(Y) holds structurally.
  [[nodiscard]] bool periodic() const;
  [[nodiscard]] std::string kind_name() const;

 private:
  PerturbationKind kind_ = PerturbationKind::zero;
  int n_ = 0;
  std::vector<double> detune_;
  double amplitude_ = 0.0;
  double mode_ = 1.0;
  std::vector<double> phases_;
  std::vector<double> cos_phase_;
  std::vector<double> sin_phase_;
};

/// ||H||_B, exact for the supported kinds.
double norm_h(const PerturbationSpec& perturbation);

}  // namespace mfsync

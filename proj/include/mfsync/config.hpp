#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mfsync/model.hpp"

namespace mfsync {

/// Perturbation section of a model configuration. Values act on
/// period-normalized phases.
struct PerturbationConfig {
  std::string kind = "zero";  // zero | detune | trig
  std::vector<double> values;
  double amplitude = 0.0;
  /// Amplitude is a fraction of the perturbation budget r.
  bool relative = false;
  double mode = 1.0;
  std::vector<double> phases;
};

struct ModelConfig {
  std::string type = "kuramoto";  // kuramoto | winfree | custom
  double omega = 1.0;
  double kappa = 0.2;
  int n = 5;
  /// custom only
  std::vector<TrigTerm> terms;
  PerturbationConfig perturbation;
};

struct SweepRange {
  double min = 0.0;
  double max = 1.0;
  int count = 20;
};

struct RunConfig {
  ModelConfig model;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  int grid = 2048;
  std::optional<double> h;
  double t_max = 1000.0;
  std::optional<double> d;
  bool optimize_radius = false;
  bool strict = false;
  bool empirical = false;
  bool svg = false;
  std::size_t stride = 10;
  std::vector<double> x0;
  /// Random initial conditions fill this fraction of the tube.
  double spread_fraction = 0.5;
  double tol = 1e-10;
  int max_iter = 200;
  int psi_samples = 200;
  SweepRange kappa_range{0.1, 2.0, 20};
  SweepRange omega_range{0.2, 4.0, 20};
  double probe_t = 20.0;
};

/// Parses {"type", "omega", "kappa", "n", "terms", "perturbation"}; throws
/// std::invalid_argument on schema errors.
ModelConfig parse_model_config(const nlohmann::json& j);
ModelConfig load_model_config(const std::string& path);

nlohmann::json to_json(const ModelConfig& m);
nlohmann::json to_json(const RunConfig& c);

/// Natural-units model as configured, then period-normalized.
ModelSpec build_model(const ModelConfig& config);

/// `radius` resolves relative amplitudes; random phases or detunes come from `seed`.
PerturbationSpec build_perturbation(const PerturbationConfig& config, int n, double radius,
                                    std::uint64_t seed);

}  // namespace mfsync

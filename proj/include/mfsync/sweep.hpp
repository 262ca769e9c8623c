#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mfsync/config.hpp"

namespace mfsync {

enum class CellClass { h_fail, hstar_fail, both_hold, numerical_failure };

std::string to_string(CellClass c);

struct SweepCell {
  double kappa = 0.0;
  double omega = 0.0;
  CellClass classification = CellClass::numerical_failure;
  /// Present iff both hypotheses hold.
  std::optional<double> d_star;
  std::optional<double> radius;
  /// Short H = 0 run from a random in-tube start (--empirical only).
  std::optional<bool> empirical_sync;
  std::string note;
};

struct SweepSpec {
  /// Model type, n and custom terms; omega and kappa are overwritten per cell.
  ModelConfig model;
  SweepRange kappa;
  SweepRange omega;
  bool empirical = false;
  double probe_t = 20.0;
  std::uint64_t seed = 1;
  int grid = 2048;
  /// 0 picks worker_count().
  int threads = 0;
};

/// Evenly spaced values min..max inclusive.
std::vector<double> linspace(const SweepRange& range);

/// Hardware concurrency, overridden by MEANFIELD_SYNC_THREADS when set.
int worker_count();

SweepCell evaluate_cell(const SweepSpec& spec, double kappa, double omega, std::uint64_t seed);

/// Cells in row-major order: kappa outer, omega inner. Output does not depend
/// on the number of workers.
std::vector<SweepCell> run_sweep(const SweepSpec& spec);

}  // namespace mfsync

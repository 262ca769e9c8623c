#pragma once

#include <ostream>

#include "mfsync/config.hpp"

namespace mfsync {

enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitHypothesis = 2,
  kExitVerdict = 3,
  kExitSolver = 4,
};

// Each command writes its artifacts under config.out_dir and a JSON summary to `out`.
int cmd_check(const RunConfig& config, std::ostream& out);
int cmd_dispersion(const RunConfig& config, std::ostream& out);
int cmd_simulate(const RunConfig& config, std::ostream& out);
int cmd_lock(const RunConfig& config, std::ostream& out);
int cmd_sweep(const RunConfig& config, std::ostream& out);

}  // namespace mfsync

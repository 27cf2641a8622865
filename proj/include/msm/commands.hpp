#pragma once

#include <iosfwd>

#include "msm/config.hpp"

namespace msm {

/// Process exit statuses of the run commands.
enum ExitStatus : int {
  kExitOk = 0,
  kExitValidationFailed = 1,  ///< error above the bound, or a censored run
  kExitConfigError = 2,       ///< unusable configuration or non-flowing regime
  kExitRuntimeError = 3,      ///< solver failure, step limit, unconverged steady state
};

/// Steady uniform flow against the closed-form profile: profile.csv, error.csv,
/// surface_velocity_vs_theta.csv and config.ini in the output directory.
int cmd_uniform_flow(const RunConfig& config, std::ostream& log);

/// One collapse run: snapshots.csv, w_profiles.csv, diagnostics.csv, deposit.csv,
/// summary.csv and config.ini.
int cmd_collapse(const RunConfig& config, std::ostream& log);

/// Grid of collapse runs: runout_vs_hi.csv plus one subdirectory per scenario.
int cmd_sweep(const RunConfig& config, std::ostream& log);

int run_command(const RunConfig& config, std::ostream& log);

}  // namespace msm

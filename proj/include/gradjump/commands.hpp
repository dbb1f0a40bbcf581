#pragma once

// Subcommands behind the gradjump executable. Each returns a JSON summary,
// zero or more CSV tables and an exit code: 0 pass, 1 analysis-level failure,
// 2 configuration error.

#include <string>
#include <vector>

#include "gradjump/io.hpp"

namespace gradjump {

enum ExitCode : int { kExitPass = 0, kExitFailure = 1, kExitConfig = 2 };

struct CommandResult {
  int exit_code = kExitPass;
  json summary;
  std::vector<CsvTable> tables;  // the first one is the primary table
};

CommandResult cmd_check(const RunConfig& config);
CommandResult cmd_sweep_h(const RunConfig& config);
CommandResult cmd_path_dt(const RunConfig& config);
CommandResult cmd_envelope(const RunConfig& config);
CommandResult cmd_antiplane(const RunConfig& config);
CommandResult cmd_scan(const RunConfig& config);

const std::vector<std::string>& command_names();

/// Dispatches by name and turns library errors into error objects:
/// ConfigError and DimensionError map to exit 2, every other error to exit 1.
CommandResult run_command(const std::string& name, const RunConfig& config);

}  // namespace gradjump

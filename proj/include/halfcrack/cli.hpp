#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "halfcrack/config.hpp"

namespace halfcrack {

enum ExitCode : int {
    kExitOk = 0,
    kExitConfig = 2,
    kExitNumerical = 3,
    kExitIo = 4,
};

/// Outcome of one subcommand: files written and the exit code it asks for.
struct CommandResult {
    std::vector<std::string> files;
    int exit_code = kExitOk;
};

CommandResult cmd_forward(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);
/// Exit code kExitNumerical when the best start did not converge.
CommandResult cmd_invert(const RunConfig& cfg, const std::string& data_path,
                         const std::string& out_dir, std::ostream& log);
CommandResult cmd_stability(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);
CommandResult cmd_jumps(const RunConfig& cfg, const std::string& out_dir, std::ostream& log);
CommandResult cmd_counterexample(const RunConfig& cfg, const std::string& out_dir,
                                 std::ostream& log);

/// Reads boundary data (columns x1, x2, value) and orders it like `sensors`.
/// Throws IoError if the file is unreadable, DomainError if the points do not
/// match the sensor set one to one.
BoundaryData read_boundary_data(const std::string& path, const SensorSet& sensors);

/// Full front end: parses arguments, runs the subcommand, maps exceptions to
/// exit codes (2 config, 3 numerical, 4 I/O).
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace halfcrack

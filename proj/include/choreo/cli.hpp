#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "choreo/config.hpp"
#include "choreo/orbit_io.hpp"

namespace choreo {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitError = 1,
  kExitUsage = 2,
  kExitVerificationFailed = 3,
  kExitNotConverged = 4,
};

/// Seed, solve with continuation, verify and package the result.
OrbitDocument solve_config(const ConfigDocument& config, const ProgressFn& progress = {},
                           SolveReport* report = nullptr, int verify_steps = 20000);

/// Entry point of `nbody8`; args[0] is the program name. Errors are written to
/// `err` as one line "error: <category>: <message>".
int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace choreo

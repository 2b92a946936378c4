#pragma once

#include <ostream>

namespace gom {

/// Exit statuses of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitInput = 2,
  kExitNumeric = 3,
  kExitPrecondition = 4,
};

/// Entry point of the `gom` tool: subcommands fit, simulate, evaluate,
/// diagnose, bench and ksweep. Messages go to `out` / `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace gom

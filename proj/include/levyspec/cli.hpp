#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace levyspec {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitValidation = 2,
  kExitNumeric = 3,
  kExitNoStabilization = 4,
};

/// Runs the command line `args` (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace levyspec

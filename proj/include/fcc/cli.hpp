#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fcc {

/// Exit codes of the command-line front end.
enum ExitCode : int {
  kExitSuccess = 0,
  kExitFail = 1,
  kExitDeadlock = 2,
  kExitStepLimit = 3,
  kExitUsage = 64,
};

/// Entry point of the `fcc` tool; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fcc

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace netinv::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kInconclusive = 2,
  kNoConvergence = 3,
  kUnsupported = 4,
};

/// Runs one netinv command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace netinv::cli

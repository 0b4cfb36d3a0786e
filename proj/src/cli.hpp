#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace twostacks::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kUsage = 2,
  kInputFormat = 3,
  kResourceLimit = 4,
  kVerificationFailed = 5,
};

/// Runs one command line (without the program name). Results go to `out`,
/// diagnostics and timing to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace twostacks::cli

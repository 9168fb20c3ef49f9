#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace crlab::cli {

enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kCodecFailed = 2,
  kUsage = 64,
};

/// Runs one command line (args[0] is the program name). Tables and reports
/// go to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace crlab::cli

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace topokinetic::cli {

enum ExitCode : int { kOk = 0, kCheckFailed = 1, kUsageError = 2 };

/// Runs the command line `args` (without the program name). Summaries go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace topokinetic::cli

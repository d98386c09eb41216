#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace obddproof::cli {

enum ExitCode : int { kOk = 0, kNotRefuted = 1, kUsage = 2, kBudget = 3 };

// Runs one command line (args excludes the program name). Machine-readable
// output goes to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace obddproof::cli

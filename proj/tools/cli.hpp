#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace a11yrev::cli {

enum ExitCode : int { kExitOk = 0, kExitDomain = 1, kExitUsage = 2 };

// Runs one command line (without the program name). Reports and data written
// to "-" go to out; diagnostics go to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace a11yrev::cli

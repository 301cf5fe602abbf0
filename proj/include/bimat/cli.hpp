#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bimat::cli {

enum ExitCode : int { ok = 0, precondition = 2, numeric = 3 };

/// Runs one command line (without the program name). Reports go to `out`
/// unless --output is given; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bimat::cli

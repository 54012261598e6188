#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qhnn {

/// Entry point behind the command-line tool; returns the process exit code.
/// 0 = success, 1 = check failure, 2 = usage error, 3 = budget exceeded.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qhnn

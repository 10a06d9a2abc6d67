#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace exactci::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitComputation = 1;
inline constexpr int kExitUsage = 2;

// Runs the command line `args` (without the program name). Returns the
// process exit code: 2 for argument errors, 1 for computation errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace exactci::cli

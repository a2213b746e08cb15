#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scgan::cli {

/// Runs the command line `args` (args[0] is the program name). Normal output
/// goes to `out`, diagnostics to `err`. Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 1;
inline constexpr int kConfig = 2;
inline constexpr int kData = 3;
inline constexpr int kAborted = 4;

}  // namespace scgan::cli

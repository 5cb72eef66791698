#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace actloc::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitParse = 2;
inline constexpr int kExitInvariant = 3;
inline constexpr int kExitIo = 4;

/// Runs the command line `args` (without the program name), writing the
/// report and progress to `out` and diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace actloc::cli

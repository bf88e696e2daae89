#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace racsep {

enum ExitCode : int { kExitPass = 0, kExitCheckFailed = 1, kExitUsage = 2, kExitResource = 3 };

/// Runs the command line `args` (without the program name). CSV and exported
/// files go to `out` unless --out names a file; diagnostics go to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "3", "2,3,5" or "1:4" (inclusive). Throws InvalidInputError.
[[nodiscard]] std::vector<std::size_t> parse_range(const std::string& text);

}  // namespace racsep

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace stablelab::cli {

/// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// Parses `args` (without the program name) and runs the chosen subcommand:
/// generate, match, enumerate, predict, integrate, simulate, sweep or
/// oracle-check. Results go to `out` (or to --out); diagnostics to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stablelab::cli

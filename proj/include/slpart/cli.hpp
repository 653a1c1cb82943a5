#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace slpart::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitUsage = 64;

/// Runs one subcommand (eig, optimize, gamma, recovery, verify, blieb).
/// args excludes the program name. Results go to `out` unless an output
/// path is given; diagnostics go to `err`.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string usage();

}  // namespace slpart::cli

#pragma once

#include <ostream>

namespace repsim::cli {

// Process exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;     ///< I/O, format, shape or stage failure
inline constexpr int kExitDegenerate = 2;  ///< metric undefined for the input
inline constexpr int kExitUsage = 64;

/// Entry point of the `repsim` tool: subcommands metric, compare, simulate,
/// demo and render. Never throws; every failure maps to an exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace repsim::cli

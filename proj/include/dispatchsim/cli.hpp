#pragma once

#include <iosfwd>

namespace dispatchsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitShortfall = 3;

// Entry point behind the `dispatchsim` executable. Subcommands: generate,
// simulate, benchmark, stats. Never throws; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dispatchsim

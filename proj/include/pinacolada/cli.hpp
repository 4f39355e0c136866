#pragma once

#include <iosfwd>

namespace pinacolada::cli {

inline constexpr int kExitSafe = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitResourceLimit = 2;
inline constexpr int kExitInternal = 3;
inline constexpr int kExitUnsafe = 10;

/// The whole command-line tool; returns the process exit code.
int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace pinacolada::cli

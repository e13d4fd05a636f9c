#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace catgan::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitFailure = 2;

/// Runs one command; args excludes the program name. Every option is
/// validated before anything is written.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace catgan::cli

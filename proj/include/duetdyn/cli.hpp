// cli.hpp: command-line front end. Kept in the library so tests can drive
// it without spawning processes.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace duetdyn::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1; // validation or physics-guard failure
inline constexpr int kExitUsage = 2;

// args excludes the program name. Never throws.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace duetdyn::cli

#pragma once

#include <iosfwd>

namespace invctl::cli {

// Process exit codes.
inline constexpr int exit_ok = 0;
inline constexpr int exit_check_failed = 1;
inline constexpr int exit_bad_input = 2;
inline constexpr int exit_infinite_alpha = 3;
inline constexpr int exit_policy_mismatch = 4;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace invctl::cli

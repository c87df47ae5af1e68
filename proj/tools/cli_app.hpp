#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace complement_lab::cli {

/// Exit codes; stable contract.
inline constexpr int exit_ok = 0;
inline constexpr int exit_internal = 1;
inline constexpr int exit_input_error = 2;
inline constexpr int exit_parse_error = 3;

/// Runs the command line `args` (args[0] is the program name) writing
/// reports to `out` and diagnostics to `err`. Returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "a", "a:b:n" (n points, both ends inclusive) or "v1,v2,...".
std::vector<double> parse_grid(const std::string& spec);

}  // namespace complement_lab::cli

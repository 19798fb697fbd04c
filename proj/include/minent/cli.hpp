#pragma once

// Command-line front end. Subcommands: estimate, simulate, sweep, bounds,
// variance, vbar, oracle.
//
// Exit codes: 0 ok, 2 usage or invalid parameter, 3 unreadable or malformed
// input, 4 the data cannot support the estimate. Failures print a JSON
// object {"error": {"code": ..., "message": ...}} on the error stream.

#include <iosfwd>
#include <string>
#include <vector>

namespace minent {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInput = 3;
inline constexpr int kExitEstimation = 4;

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// "2..6" (inclusive range) or "2,3,5".
std::vector<int> parse_int_list(const std::string& text);
/// "0.1,0.2,0.3".
std::vector<double> parse_double_list(const std::string& text);

}  // namespace minent

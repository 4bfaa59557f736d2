#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace eis::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInstability = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "-1/4", "4/13", "0.1667", "1e-3".
double parse_real(std::string_view text);
/// Comma-separated parse_real values.
std::vector<double> parse_real_list(std::string_view text);
std::vector<int> parse_int_list(std::string_view text);

/// Runs the command line; returns the process exit status.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eis::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gbfim::cli {

/// Exit codes: 0 success, 1 usage or input error, 2 numerical failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitNumerical = 2;

/// Runs the gbfim command line. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace gbfim::cli

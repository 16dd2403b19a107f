#pragma once

#include <iosfwd>

namespace rldp::cli {

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kParseError = 2,
  kValidationError = 3,
  kConvergenceError = 4,
};

/// Entry point of the rldp_cli tool. Reports go to --out (or `out`),
/// structured errors to `err` and, when given, to --out as well.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace rldp::cli

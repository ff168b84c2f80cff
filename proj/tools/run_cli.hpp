#pragma once

#include <iosfwd>

namespace nepbe::cli {

enum ExitCode : int {
  kSuccess = 0,
  kComputationFailed = 1,
  kUsageError = 2,
};

/// Entry point of the nepbe tool; argv[0] is the program name.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace nepbe::cli

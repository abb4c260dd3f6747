#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace stagelab::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kNumeric = 2,
  kPartialSweep = 3,
};

/// Environment variable that replaces the default output directory.
inline constexpr const char* kOutputDirEnv = "STAGELAB_OUTPUT_DIR";

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stagelab::cli

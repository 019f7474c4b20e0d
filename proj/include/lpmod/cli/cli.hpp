#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lpmod::cli {

/// Exit statuses of the driver.
enum Exit : int {
  kOk = 0,
  kCompileOrNoAnswer = 1,
  kNonConforming = 2,
  kRequiresViolated = 3,
  kEnsuresViolated = 4,
  kInternal = 5,
};

/// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lpmod::cli

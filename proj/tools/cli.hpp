#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace capreward::cli {

enum ExitCode : int {
  kSuccess = 0,
  kInputError = 1,
  kConfigError = 2,  // also command-line usage errors
  kDivergence = 3,
};

// Entry point shared by the executable and the tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace capreward::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rposet::cli {

enum ExitCode : int {
  kOk = 0,
  kError = 1,
  kParse = 2,
  kInfeasible = 3,
  kBudget = 4,
  kValidation = 5,
  kUsage = 64,
};

/// Runs one `rposet` invocation; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rposet::cli

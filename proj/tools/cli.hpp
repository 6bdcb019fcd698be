#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace facpoly::cli {

enum ExitCode : int {
  kOk = 0,
  kValidation = 1,
  kBudget = 2,
  kIo = 3,
  kUsage = 64,
};

/// Runs one command. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace facpoly::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bnp::cli {

enum ExitCode : int {
  kSolved = 0,
  kInconsistent = 1,
  kLimit = 2,
  kInfeasible = 3,
  kBadInstance = 4,
};

/// Entry point of the bnpsolve tool. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Exit code implied by a solve report's "status" field.
int exit_code_for_status(const std::string& status);

}  // namespace bnp::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qed::cli {

enum ExitCode : int {
  exit_ok = 0,
  exit_failure = 1,
  exit_usage = 2,
  exit_domain = 3,
  exit_numerical = 4,
};

/// Runs one qedkit command. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qed::cli

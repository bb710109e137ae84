#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace segkit::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kIoOrFormat = 2,
  kPrecondition = 3,
};

/// Runs one subcommand. `args` excludes the program name. Results go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace segkit::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dunmix::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,  // bad flags, unreadable or malformed files
  kNumerical = 2,
  kReplayMismatch = 3,
};

/// Runs one subcommand. `args` excludes the program name.
int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dunmix::cli

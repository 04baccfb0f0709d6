#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace attestgame::cli {

enum ExitCode : int {
  kSuccess = 0,
  kUsage = 1,
  kValidation = 2,
  kUnsupported = 3,
};

// Runs one command line. args[0] is the program name. Normal output goes to
// `out`, notes and errors to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace attestgame::cli

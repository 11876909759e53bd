#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mdh::cli {

// Exit codes of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kValidationFailed = 1,
  kInputError = 2,
  kDegenerateData = 3,
  kLabelConfig = 4,
};

// Entry point behind the `mdh` executable; argv[0] is the program name.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Same, with the arguments after the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mdh::cli

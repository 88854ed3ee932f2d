#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace vibnet::cli {

enum ExitCode : int {
  kOk = 0,
  kConditionNotMet = 1,  // not stabilizable, not Hurwitz, no threshold, ...
  kInputError = 2,
};

// Entry point of the `vibnet` tool. Human-readable summaries go to `out`,
// diagnostics to `err`; machine output goes to the files named by flags.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

// Convenience overload; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace vibnet::cli

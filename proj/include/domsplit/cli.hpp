#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace domsplit::cli {

inline constexpr const char* kToolVersion = "domsplit 0.1.0";

enum ExitCode : int {
  kPass = 0,
  kFail = 1,
  kMalformed = 2,
  kInconclusive = 3,
};

int run(int argc, char** argv, std::ostream& out, std::ostream& err);
// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace domsplit::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mixsdp::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kInputOutput = 2,
  kNotConverged = 3,
  kCheckFailed = 4,
};

/// Entry point behind the `mixsdp` binary. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mixsdp::cli

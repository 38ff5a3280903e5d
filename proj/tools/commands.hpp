#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace eagers::cli {

// Stable process exit codes.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,          // unexpected runtime error
  kBadConfig = 2,        // usage errors, unreadable or invalid config
  kBackendUnreachable = 3,
  kUnknownQuestion = 4,
  kBadDataset = 5,       // unparseable split, no usable records, duplicate ids
};

/// Entry point shared by main() and the tests. `args` excludes argv[0].
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace eagers::cli

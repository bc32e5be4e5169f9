#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fogforge::cli {

enum ExitCode : int { kOk = 0, kInternal = 1, kUsage = 2, kDiverged = 3 };

/// Entry point shared by the executable and the tests. `args` excludes the
/// program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fogforge::cli

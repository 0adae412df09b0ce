#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace scholmig::cli {

enum ExitCode : int { kSuccess = 0, kConfigError = 2, kDataError = 3, kStageOrderError = 4 };

/// Runs one command line (without the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace scholmig::cli

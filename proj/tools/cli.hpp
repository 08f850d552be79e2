#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace teamsim::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kLintFailure = 2, kReplayDivergence = 3 };

// Runs one command line (without the program name). Output goes to `out`,
// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace teamsim::cli

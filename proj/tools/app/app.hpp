#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace dislo::app {

// Exit codes: 0 success, 2 usage / unknown subcommand, 3 malformed
// configuration, 4 infeasible geometry, 5 runtime failure.
enum ExitCode {
    kOk = 0,
    kUsage = 2,
    kBadConfig = 3,
    kBadGeometry = 4,
    kRuntime = 5,
};

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dislo::app

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lap {

enum ExitCode { kExitOk = 0, kExitCounterexample = 1, kExitUsage = 2 };

// Entry point shared by the `lap` binary and the tests.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lap

#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace minimod {

/// Exit codes of the command-line driver.
enum ExitCode { kOk = 0, kTypeError = 1, kParseError = 2, kRuntimeError = 3, kUsage = 4 };

/// Runs the driver on `args` (without the program name).
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace minimod

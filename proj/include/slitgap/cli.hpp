#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace slitgap {

enum ExitCode : int { kExitOk = 0, kExitInternal = 1, kExitUsage = 2, kExitInvalidState = 3, kExitRegression = 4 };

// Full command-line entry point; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// key = value lines with # comments; returns (key, value) pairs in order.
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path);

}  // namespace slitgap

#pragma once

#include <string>
#include <vector>

namespace eventcast {

/// Entry point behind the binary: parses subcommands and flags, runs the
/// pipeline stage and returns the process exit code (0 ok, 1 I/O, 2 config,
/// 3 resource budget, 4 internal invariant violation).
int run_cli(const std::vector<std::string>& args);
int run_cli(int argc, char** argv);

}  // namespace eventcast

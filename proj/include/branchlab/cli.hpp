#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace branchlab {

// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitVerificationFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitBudget = 3;

// Runs one subcommand; `args` excludes the program name. Results go to `out`,
// diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace branchlab

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ergo {

inline constexpr const char* kEngineVersion = "ergolab 1.0.0";

/// Exit codes of the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitValidation = 1,
    kExitBudget = 2,
    kExitInternal = 3,
};

/// Runs one subcommand. args excludes the program name, e.g.
/// {"pleasant", "--scenario", "scenarios/cyclic-5.json", "--max-m", "1"}.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace ergo

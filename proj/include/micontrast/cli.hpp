#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace micontrast::cli {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kSuccess = 0, kRuntimeFailure = 1, kUsageError = 2 };

/// Entry point behind the `micontrast` binary. `args` excludes the program
/// name. CSV goes to --out when given, otherwise to `out`; diagnostics and
/// usage go to `err`.
///
/// Setting precedence: command-line flag, then --config file key, then the
/// MICONTRAST_SEED environment variable (seed only), then built-in defaults.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace micontrast::cli

#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace fbgain::cli {

enum ExitCode : int { kSuccess = 0, kFailure = 1, kUsage = 2 };

/// Runs one CLI invocation. `args` excludes the program name. Results go to
/// `out` (or the --out file), diagnostics to `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace fbgain::cli

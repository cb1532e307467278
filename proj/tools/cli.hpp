#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace amle::cli {

enum ExitCode : int { kOk = 0, kInputError = 1, kNumericalError = 2 };

/// Runs one subcommand (simulate, estimate, coverage, chi2). argv[0] is the
/// program name. Normal output goes to `out`, diagnostics and usage to `err`.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace amle::cli

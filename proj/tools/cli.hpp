#pragma once

#include <ostream>

namespace iilasso::cli {

/// Process exit codes.
enum ExitCode : int {
    kOk = 0,
    kInputError = 1,
    kNotConverged = 2,
    kConditionFailed = 3,
};

/// Runs one command line (argv[0] is the program name). Result payloads go to
/// `out` unless --out names a file; diagnostics go to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace iilasso::cli

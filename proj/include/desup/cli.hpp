// The desup command-line interface, callable in-process.

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace desup {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
    kExitOk = 0,          // success; property holds / plant is opaque
    kExitFalse = 1,       // property fails / plant not opaque / mismatch found
    kExitUsage = 2,       // bad arguments or unparseable input
    kExitNoSupervisor = 3 // synthesis: no opacity-enforcing supervisor exists
};

/// Runs one CLI invocation. `args` excludes the program name. All output
/// goes to the given streams; nothing else is touched, so identical
/// arguments and input files produce identical bytes on `out`.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace desup

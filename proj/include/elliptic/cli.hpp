#ifndef ELLIPTIC_CLI_HPP
#define ELLIPTIC_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

namespace elliptic {

/// Exit codes of the command-line tool.
enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitHypothesis = 2,
    kExitUndetermined = 3,
    kExitNumerical = 4,
};

/// Runs one command. args excludes the program name. Reports go to out (or
/// the --out file); one summary line per solve goes to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace elliptic

#endif

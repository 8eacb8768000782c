#pragma once

#include <string>
#include <vector>

namespace seabed::cli {

// Parses the command line (subcommands simulate, measure, solve, certify,
// invert, verify, sweep) and runs the selected command. Returns the process
// exit code:
//   0 success        1 check failure or unexpected error
//   2 config error   3 solver or state failure
//   4 identical pair 5 precondition failure (report still written if possible)
//   6 infeasible inversion start
int run_cli(int argc, const char* const* argv);

// Same, from the argument list without the program name.
int run_cli(const std::vector<std::string>& args);

}  // namespace seabed::cli

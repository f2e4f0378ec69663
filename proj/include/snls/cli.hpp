#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace snls {

enum ExitCode : int {
  exit_ok = 0,
  exit_usage = 2,    // bad flags or invalid configuration
  exit_io = 3,       // file system / format errors
  exit_runtime = 4,  // numerical or state errors during a run
  exit_check = 5,    // an identity check ran but did not hold
};

// Subcommands: simulate, ensemble, verify, norms, check-identity
// {factorization, isometry, drift, hash}.  Errors are reported as a one-line
// JSON record on err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

}  // namespace snls

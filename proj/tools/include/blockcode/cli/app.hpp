#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace blockcode::cli {

/// Runs one command line (without the program name). Returns the process
/// exit code: 0 success, 1 failure, 2 usage error. Failures print exactly
/// one line "error: <kind>: <message>" to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace blockcode::cli

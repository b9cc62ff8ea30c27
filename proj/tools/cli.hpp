#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace histtools::cli {

/// Runs one command line (args excludes the program name).  Machine-readable
/// results go to `out`, diagnostics to `err`.  Returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "a,b,c", "lin:start:stop:n" or "log2:kmin:kmax".
std::vector<double> parse_breaks_spec(const std::string& spec);

}  // namespace histtools::cli

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qclock::cli {

/// Runs one command line (args excludes the program name). Returns 0 on
/// success, 1 on a domain error (reported as JSON naming the error) and 2 on
/// usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace qclock::cli

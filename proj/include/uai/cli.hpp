#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uai::cli {

// Run one command (args excludes the program name).  On success a single JSON
// document goes to `out` and the return value is 0.  Computation errors also
// emit a structured JSON object on `out` and return 1.  Usage errors print a
// message to `err` and return 2.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace uai::cli

#pragma once

#include <string>

#include "uai/sample.hpp"

namespace uai {

// Read a return series from CSV.  Accepted layouts:
//   - one numeric value per line, or
//   - two columns `timestamp,return` (the second column is taken);
// a single leading header line is auto-detected and skipped, lines starting
// with '#' and blank lines are ignored.  Numbers use a decimal point; parse
// failures throw std::runtime_error naming the offending line.
ReturnSeries read_returns_csv(const std::string& path);

// Write a series in the same one-value-per-line layout (with a '#' provenance
// comment), so simulate output round-trips through read_returns_csv.
void write_returns_csv(const std::string& path, const ReturnSeries& series);

} // namespace uai

#pragma once

#include "seloqr/types.hpp"

#include <string>

namespace seloqr {

/// Numeric CSV, one observation per row. An optional header row is detected
/// by any cell that does not parse as a number; a header column named "y"
/// marks the response (default: the first column). Remaining columns form X
/// in file order. Cells must be finite; problems are reported with one-based
/// row and column positions.
Dataset read_csv(const std::string& path);

/// Header y,x1..xd plus shortest round-trip numeric cells.
void write_csv(const std::string& path, const Dataset& ds);

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

}  // namespace seloqr

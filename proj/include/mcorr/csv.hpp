#pragma once

#include <string>

#include "mcorr/linalg.hpp"

namespace mcorr {

/// Reads a rectangular numeric CSV, rows are observations. Without a header
/// the columns are named X1..Xp. Cells that do not parse as finite numbers
/// (including NA and empty cells) are rejected with the offending row and
/// column; rows are counted from 1 excluding the header.
DataMatrix ingest_csv(const std::string& path, bool has_header = true);

DataMatrix parse_csv(const std::string& text, bool has_header = true);

}  // namespace mcorr

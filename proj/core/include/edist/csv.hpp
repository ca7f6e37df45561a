#pragma once

#include <string>

#include "edist/matrix.hpp"

namespace edist {

/// Reads a comma-separated dataset. The first line is always treated as a
/// header; every following line must hold one decimal float per column.
/// A malformed or non-finite cell aborts with "path:LINE:COL: message"
/// (1-based line over the whole file, 1-based column).
DatasetMatrix load_csv(const std::string& path);

/// Parses CSV text that was already read from `name` (used for error messages).
DatasetMatrix parse_csv(const std::string& text, const std::string& name);

/// Writes a dataset with header x1..xd and shortest round-trip float cells.
void save_csv(const DatasetMatrix& m, const std::string& path);

/// CSV text form of a dataset (same format as save_csv).
std::string to_csv_string(const DatasetMatrix& m);

} // namespace edist

#pragma once

#include <string>
#include <vector>

#include "tca/matrix.hpp"

namespace tca {

// Formats a double with 17 significant digits, enough to round-trip any
// finite f64 exactly through text.
std::string format_g17(double v);

void write_text_file(const std::string& path, const std::string& contents);
std::string read_text_file(const std::string& path);  // IoError if unreadable

// Numeric CSV, rows = time, cols = features, no header. Values are written
// with format_g17 so a write/read round trip is bit exact.
void write_matrix_csv(const Matrix& m, const std::string& path);

// Parses a numeric CSV. An optional single header line is skipped when its
// first cell is not numeric. Errors name the file and 1-based line:
// missing file, ragged row, non-numeric cell are distinct DataErrors.
Matrix read_matrix_csv(const std::string& path);

}  // namespace tca

#include "tca/textio.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "tca/error.hpp"

namespace tca {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_text_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw IoError("write failed: " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_matrix_csv(const Matrix& m, const std::string& path) {
  std::string out;
  out.reserve(static_cast<std::size_t>(m.size()) * 20);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out += ',';
      out += format_g17(m.at(i, j));
    }
    out += '\n';
  }
  write_text_file(path, out);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  cells.push_back(cur);
  return cells;
}

bool parse_double(const std::string& cell, double* out) {
  const char* s = cell.c_str();
  char* end = nullptr;
  *out = std::strtod(s, &end);
  if (end == s) return false;
  while (*end == ' ' || *end == '\t') ++end;
  return *end == '\0';
}

}  // namespace

Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("missing or unreadable file: " + path);

  std::vector<double> values;
  int cols = -1;
  int rows = 0;
  std::string line;
  int lineno = 0;
  bool first_content_line = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells = split_csv(line);

    if (first_content_line) {
      // Header detection: skip the first line when its first cell is not
      // numeric.
      double probe;
      first_content_line = false;
      if (!parse_double(cells[0], &probe)) continue;
    }

    if (cols < 0) {
      cols = static_cast<int>(cells.size());
    } else if (static_cast<int>(cells.size()) != cols) {
      throw DataError(path + ":" + std::to_string(lineno) + ": expected " + std::to_string(cols) +
                      " columns, got " + std::to_string(cells.size()));
    }
    for (const std::string& cell : cells) {
      double v;
      if (!parse_double(cell, &v)) {
        throw DataError(path + ":" + std::to_string(lineno) + ": non-numeric cell '" + cell + "'");
      }
      values.push_back(v);
    }
    ++rows;
  }
  if (rows == 0 || cols <= 0) throw DataError(path + ": no numeric rows");
  return Matrix(rows, cols, std::move(values));
}

}  // namespace tca

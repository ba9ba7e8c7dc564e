#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "scalex/matrix.hpp"

namespace scalex {

// Matrix and vector I/O: plain CSV, one matrix row per line, comma-separated
// values, no header; vectors are a single line. Doubles are written with 17
// significant digits so values round-trip exactly.

inline std::string format_double17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace detail {
inline std::vector<double> parse_csv_line(const std::string& line, std::size_t line_no) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t comma = line.find(',', pos);
    std::size_t end = (comma == std::string::npos) ? line.size() : comma;
    std::size_t begin = pos;
    while (begin < end && (line[begin] == ' ' || line[begin] == '\t')) ++begin;
    std::size_t last = end;
    while (last > begin && (line[last - 1] == ' ' || line[last - 1] == '\t' ||
                            line[last - 1] == '\r'))
      --last;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(line.data() + begin, line.data() + last, value);
    if (ec != std::errc{} || ptr != line.data() + last)
      throw std::invalid_argument("CSV: malformed number on line " + std::to_string(line_no) +
                                  ", field " + std::to_string(out.size() + 1));
    out.push_back(value);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}
}  // namespace detail

inline Matrix read_matrix_csv(std::istream& in) {
  std::vector<double> data;
  std::size_t rows = 0, cols = 0, line_no = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    bool blank = true;
    for (char c : line)
      if (c != ' ' && c != '\t' && c != '\r') blank = false;
    if (blank) continue;
    std::vector<double> fields = detail::parse_csv_line(line, line_no);
    if (rows == 0)
      cols = fields.size();
    else if (fields.size() != cols)
      throw std::invalid_argument("CSV: line " + std::to_string(line_no) + " has " +
                                  std::to_string(fields.size()) + " fields, expected " +
                                  std::to_string(cols));
    data.insert(data.end(), fields.begin(), fields.end());
    ++rows;
  }
  if (rows == 0) throw std::invalid_argument("CSV: no data rows");
  return Matrix(rows, cols, std::move(data));
}

inline Matrix read_matrix_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  try {
    return read_matrix_csv(in);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

inline std::vector<double> read_vector_csv(const std::string& path) {
  Matrix m = read_matrix_csv(path);
  if (m.rows() != 1)
    throw std::invalid_argument(path + ": expected a single-line CSV vector, got " +
                                std::to_string(m.rows()) + " lines");
  return {m.data().begin(), m.data().end()};
}

inline void write_matrix_csv(std::ostream& out, const Matrix& m) {
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << format_double17(m(i, j));
    }
    out << '\n';
  }
}

inline void write_matrix_csv(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  write_matrix_csv(out, m);
}

inline void write_vector_csv(const std::string& path, std::span<const double> v) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out << ',';
    out << format_double17(v[i]);
  }
  out << '\n';
}

}  // namespace scalex

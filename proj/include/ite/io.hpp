#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ite/core/error.hpp"
#include "ite/core/sample.hpp"

/// CSV ingestion and export. Rows are observations. A first row containing
/// any non-numeric cell is taken as a header.
namespace ite::io {

struct CsvTable {
  std::vector<std::string> header;
  Sample sample;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

inline std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(delimiter, start);
    cells.push_back(trim(line.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

inline bool parse_double(std::string_view cell, double& out) {
  if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
  if (cell.empty()) return false;
  const auto* end = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(cell.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace detail

/// Parses CSV text. Throws InvalidInput on ragged rows, empty input or
/// cells that are not finite reals.
inline CsvTable parse_csv(std::string_view text, char delimiter = ',') {
  if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto pos = text.find('\n', start);
    const auto line = detail::trim(text.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (!line.empty()) lines.push_back(line);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  ite::detail::require(!lines.empty(), ErrorCode::InvalidInput, "no data rows");

  CsvTable table;
  std::size_t first = 0;
  {
    const auto cells = detail::split(lines[0], delimiter);
    double dummy = 0.0;
    bool numeric = true;
    for (auto c : cells) numeric = numeric && detail::parse_double(c, dummy);
    if (!numeric) {
      for (auto c : cells) table.header.emplace_back(c);
      first = 1;
    }
  }
  ite::detail::require(lines.size() > first, ErrorCode::InvalidInput, "no data rows");

  const auto width = detail::split(lines[first], delimiter).size();
  if (!table.header.empty())
    ite::detail::require(table.header.size() == width, ErrorCode::InvalidInput,
                         "header has " + std::to_string(table.header.size()) + " columns, data has " +
                             std::to_string(width));
  RowMatrix data(static_cast<Index>(lines.size() - first), static_cast<Index>(width));
  for (std::size_t r = first; r < lines.size(); ++r) {
    const auto cells = detail::split(lines[r], delimiter);
    const auto row_no = std::to_string(r + 1);
    ite::detail::require(cells.size() == width, ErrorCode::InvalidInput,
                         "line " + row_no + " has " + std::to_string(cells.size()) + " cells, expected " +
                             std::to_string(width));
    for (std::size_t c = 0; c < width; ++c) {
      double v = 0.0;
      ite::detail::require(detail::parse_double(cells[c], v) && std::isfinite(v), ErrorCode::InvalidInput,
                           "line " + row_no + ", column " + std::to_string(c + 1) + ": '" +
                               std::string(cells[c]) + "' is not a finite number");
      data(static_cast<Index>(r - first), static_cast<Index>(c)) = v;
    }
  }
  table.sample = Sample(std::move(data));
  return table;
}

inline CsvTable read_csv_table(const std::string& path, char delimiter = ',') {
  std::ifstream in(path, std::ios::binary);
  ite::detail::require(static_cast<bool>(in), ErrorCode::InvalidInput, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_csv(buf.str(), delimiter);
  } catch (const Error& e) {
    throw Error(e.code(), path + ": " + e.message());
  }
}

inline Sample read_csv(const std::string& path, char delimiter = ',') {
  return read_csv_table(path, delimiter).sample;
}

/// Shortest representation that reads back to the same double (17 digits).
inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string to_csv(const Sample& s, char delimiter = ',', const std::vector<std::string>& header = {}) {
  std::string out;
  if (!header.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c) out += delimiter;
      out += header[c];
    }
    out += '\n';
  }
  for (Index i = 0; i < s.n(); ++i) {
    for (Index j = 0; j < s.d(); ++j) {
      if (j) out += delimiter;
      out += format_real(s.data()(i, j));
    }
    out += '\n';
  }
  return out;
}

inline void write_csv(const std::string& path, const Sample& s, char delimiter = ',') {
  std::ofstream out(path, std::ios::binary);
  ite::detail::require(static_cast<bool>(out), ErrorCode::InvalidInput, "cannot write '" + path + "'");
  out << to_csv(s, delimiter);
}

}  // namespace ite::io

#pragma once

#include <string>
#include <vector>

namespace sigsched::csv {

// Parsed CSV contents. Lines starting with '#' are provenance comments and
// are skipped; the first remaining line is the header. line_numbers keeps
// 1-based file positions for diagnostics.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  std::vector<long> line_numbers;

  // Index of a required column; throws ParseError if absent.
  std::size_t column_index(const std::string& name) const;
};

Table read_file(const std::string& path);

std::vector<std::string> split(const std::string& line, char sep);

// Shortest decimal form that round-trips the exact double. Used everywhere a
// real value lands in an output file so reruns are byte-identical.
std::string format_double(double v);

double parse_double(const std::string& text, long line, const std::string& column);
long parse_long(const std::string& text, long line, const std::string& column);

}  // namespace sigsched::csv

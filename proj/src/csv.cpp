#include "sigsched/csv.hpp"

#include <charconv>
#include <fstream>
#include <system_error>

#include "sigsched/errors.hpp"

namespace sigsched::csv {

std::size_t Table::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw ParseError("missing required column '" + name + "'", 1, name);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

Table read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open file: " + path, 0, "-");
  }
  Table table;
  std::string line;
  long line_no = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    auto fields = split(line, ',');
    if (!have_header) {
      table.columns = std::move(fields);
      have_header = true;
      continue;
    }
    if (fields.size() != table.columns.size()) {
      throw ParseError("expected " + std::to_string(table.columns.size()) +
                           " fields, got " + std::to_string(fields.size()),
                       line_no, "-");
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(line_no);
  }
  if (!have_header) {
    throw ParseError("file has no header row: " + path, line_no, "-");
  }
  return table;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text, long line, const std::string& column) {
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ParseError("not a number: '" + text + "'", line, column);
  }
  return value;
}

long parse_long(const std::string& text, long line, const std::string& column) {
  long value = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ParseError("not an integer: '" + text + "'", line, column);
  }
  return value;
}

}  // namespace sigsched::csv

#include "csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "vinoreg/errors.hpp"

namespace vinoreg::csv {

std::vector<std::string> split_line(const std::string& line,
                                    const std::string& file,
                                    std::size_t line_number) {
  std::vector<std::string> fields;
  std::string current;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          current.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      if (!current.empty())
        throw ParseError(file, line_number, "unexpected quote inside field");
      in_quotes = true;
    } else if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (in_quotes) throw ParseError(file, line_number, "unterminated quote");
  fields.push_back(current);
  return fields;
}

Table read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path.string(), 0, "cannot open file");

  Table table;
  table.path = path.string();
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_line(line, table.path, line_number);
    if (table.header.empty()) {
      table.header = std::move(fields);
      continue;
    }
    if (fields.size() != table.header.size()) {
      throw ParseError(table.path, line_number,
                       "expected " + std::to_string(table.header.size()) +
                           " fields, found " + std::to_string(fields.size()));
    }
    table.rows.push_back(Row{line_number, std::move(fields)});
  }
  if (table.header.empty())
    throw ParseError(table.path, 0, "file has no header row");
  return table;
}

namespace {

const std::string& field(const Table& t, const Row& row, std::size_t col) {
  if (col >= row.fields.size())
    throw ParseError(t.path, row.line_number, "missing field");
  return row.fields[col];
}

[[noreturn]] void bad_value(const Table& t, const Row& row, std::size_t col,
                            const char* kind) {
  const std::string name =
      col < t.header.size() ? t.header[col] : std::to_string(col);
  throw ParseError(t.path, row.line_number,
                   "field '" + name + "': cannot parse '" +
                       row.fields[col] + "' as " + kind);
}

}  // namespace

double to_double(const Table& t, const Row& row, std::size_t col) {
  const std::string& s = field(t, row, col);
  if (s.empty())
    throw ParseError(t.path, row.line_number,
                     "empty numeric field '" + t.header[col] + "'");
  double value = 0.0;
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) bad_value(t, row, col, "a number");
  return value;
}

int to_int(const Table& t, const Row& row, std::size_t col) {
  const std::string& s = field(t, row, col);
  if (s.empty())
    throw ParseError(t.path, row.line_number,
                     "empty integer field '" + t.header[col] + "'");
  int value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    bad_value(t, row, col, "an integer");
  return value;
}

bool to_bool(const Table& t, const Row& row, std::size_t col) {
  std::string s = field(t, row, col);
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (s == "1" || s == "true" || s == "yes") return true;
  if (s == "0" || s == "false" || s == "no") return false;
  bad_value(t, row, col, "a boolean");
}

std::size_t column(const Table& t, const std::string& name) {
  auto it = std::find(t.header.begin(), t.header.end(), name);
  if (it == t.header.end())
    throw ParseError(t.path, 1, "missing required column '" + name + "'");
  return static_cast<std::size_t>(it - t.header.begin());
}

std::string format_double(double v) {
  if (v == std::floor(v) && std::abs(v) < 1e15) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.0f", v);
    return buf;
  }
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace vinoreg::csv

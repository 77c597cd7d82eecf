#pragma once

// Minimal CSV support shared by the loaders and writers. Comma-delimited,
// '.' decimal separator, optional double-quote quoting, UTF-8 passthrough.

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace vinoreg::csv {

struct Row {
  std::size_t line_number = 0;  // 1-based, as in the file
  std::vector<std::string> fields;
};

struct Table {
  std::string path;
  std::vector<std::string> header;
  std::vector<Row> rows;
};

/// Reads a CSV file with a mandatory header row.
/// Throws ParseError on I/O failure, ragged rows, or bad quoting.
Table read_file(const std::filesystem::path& path);

std::vector<std::string> split_line(const std::string& line,
                                    const std::string& file,
                                    std::size_t line_number);

/// Field accessors; all throw ParseError with file:line context.
double to_double(const Table& t, const Row& row, std::size_t col);
int to_int(const Table& t, const Row& row, std::size_t col);
bool to_bool(const Table& t, const Row& row, std::size_t col);

/// Column lookup by header name; throws ParseError if missing.
std::size_t column(const Table& t, const std::string& name);

/// Formats a double with enough digits to round-trip exactly.
std::string format_double(double v);

}  // namespace vinoreg::csv

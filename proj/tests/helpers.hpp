#pragma once

// Shared test utilities: fixture paths, a deliberately naive CSV reader used
// as the independent brute-force oracle, temp directories and tiny designs.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "vinoreg/features.hpp"
#include "vinoreg/panel.hpp"

namespace testutil {

inline std::filesystem::path data_dir() { return VINOREG_DATA_DIR; }
inline std::filesystem::path fixture_countries() {
  return data_dir() / "countries.csv";
}
inline std::filesystem::path fixture_panel() { return data_dir() / "panel.csv"; }

inline const vinoreg::Panel& fixture() {
  static const vinoreg::Panel panel =
      vinoreg::load_panel(fixture_countries(), fixture_panel());
  return panel;
}

/// Line-by-line CSV reader independent of the library's loader. No quoting,
/// no validation: the oracle side of the brute-force comparisons.
struct NaiveCsv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  explicit NaiveCsv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      std::vector<std::string> fields;
      std::stringstream ss(line);
      std::string tok;
      while (std::getline(ss, tok, ',')) fields.push_back(tok);
      if (line.back() == ',') fields.push_back("");
      if (header.empty())
        header = fields;
      else
        rows.push_back(fields);
    }
  }

  std::size_t col(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    throw std::runtime_error("no column " + name);
  }
};

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    auto base = std::filesystem::temp_directory_path();
    for (int i = 0; i < 10000; ++i) {
      auto candidate = base / ("vinoreg_test_" + std::to_string(std::rand()) +
                               "_" + std::to_string(i));
      std::error_code ec;
      if (std::filesystem::create_directory(candidate, ec)) {
        path = candidate;
        return;
      }
    }
    throw std::runtime_error("cannot create temp dir");
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::filesystem::path operator/(const std::string& name) const {
    return path / name;
  }
};

inline void write_file(const std::filesystem::path& path,
                       const std::string& content) {
  std::ofstream out(path);
  out << content;
}

/// Minimal hand-built design for estimator unit tests; restriction must be
/// off since the columns are arbitrary.
inline vinoreg::DesignMatrix tiny_design(
    const std::vector<std::string>& columns,
    const std::vector<std::tuple<std::string, int, double, std::vector<double>>>&
        rows) {
  vinoreg::DesignMatrix design;
  design.measure = vinoreg::Measure::Volume;
  design.split = false;
  design.column_names = columns;
  std::map<std::string, bool> seen;
  for (const auto& [country, period, y, x] : rows) {
    vinoreg::DesignRow row;
    row.country_id = country;
    row.period = vinoreg::Period::from_index(period);
    row.y = y;
    row.x = x;
    design.rows.push_back(std::move(row));
    seen[country] = true;
  }
  design.n_countries = seen.size();
  return design;
}

}  // namespace testutil

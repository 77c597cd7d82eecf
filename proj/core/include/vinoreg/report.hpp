#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "vinoreg/estimator.hpp"
#include "vinoreg/panel.hpp"

namespace vinoreg {

/// Significance markers keyed by two-sided p-value thresholds. The default
/// follows the source tables' inverted convention: "***" at 10%, "**" at 5%
/// and "*" at 1%, so the most significant mark is a single star.
struct StarConvention {
  std::vector<std::pair<double, std::string>> thresholds;  // ascending p

  static StarConvention paper();
  static StarConvention conventional();

  /// Marker for a two-sided p-value; empty when nothing is met.
  std::string stars(double p) const;
};

enum class TableFormat { Text, Markdown, Csv };

TableFormat table_format_from_string(const std::string& s);

/// Renders one- or two-column coefficient tables: estimate to three
/// decimals with the star suffix, standard error in parentheses, variables
/// in canonical order, then a footer block with the intercept, dispersion
/// parameters and fit diagnostics. Byte-stable for identical inputs.
std::string render_table(const std::vector<const FitResult*>& results,
                         const StarConvention& convention, TableFormat format);

struct ShareSeries {
  std::string label;           // "OW", "NW", "RW", "RW imports", "OW+NA"
  std::vector<double> values;  // one fraction per period
};

struct ChartData {
  std::vector<std::string> period_labels;
  std::vector<ShareSeries> series;
};

/// Export-share series for OW, NW and RW (partitioning world exports) plus
/// the RW import share; with the flag set, adds the series where
/// North-African exports count toward the Old World.
ChartData emit_chart_data(const Panel& panel, Measure measure,
                          bool north_africa_to_ow);

void write_chart_csv(const ChartData& chart, const std::filesystem::path& path);

/// Standalone SVG line chart, one polyline per series with a legend.
void write_chart_svg(const ChartData& chart, const std::filesystem::path& path);

/// Flat JSON dump of the spec, coefficients, covariance and convergence
/// diagnostics; the schema is documented in the README and kept stable.
void write_fit_json(const FitResult& result, const ModelSpec& spec,
                    const std::filesystem::path& path);

/// Reads back a fit.json written by write_fit_json.
FitResult read_fit_json(const std::filesystem::path& path);

}  // namespace vinoreg

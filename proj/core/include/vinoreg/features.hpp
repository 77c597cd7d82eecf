#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "vinoreg/panel.hpp"

namespace vinoreg {

enum class Measure { Volume, Value };

std::string to_string(Measure m);
Measure measure_from_string(const std::string& s);

enum class DummyMode { Fractional, Binary };

/// One observation of the design: dependent export share plus the regressor
/// vector in canonical column order.
struct DesignRow {
  std::string country_id;
  Period period;
  double y = 0.0;                 // export share, in [0, 1]
  std::vector<double> x;          // regressors, canonical order
};

struct DesignMatrix {
  std::vector<DesignRow> rows;    // sorted by (country_id, period)
  Measure measure = Measure::Volume;
  bool split = false;             // LNW/ANW split active
  GroupCounts groups;
  std::vector<std::string> column_names;
  std::size_t n_countries = 0;

  std::size_t n_columns() const { return column_names.size(); }

  // Column positions of the regressors tied by the group restriction.
  int col_nirw() const { return 0; }
  int col_nirw_x_ow() const { return split ? 4 : 3; }
  int col_nirw_x_nw() const { return split ? -1 : 4; }
  int col_nirw_x_lnw() const { return split ? 5 : -1; }
  int col_nirw_x_anw() const { return split ? 6 : -1; }
};

/// Canonical regressor names; 15 columns plain, 17 with the LNW/ANW split.
std::vector<std::string> canonical_columns(bool split);

/// Country exports over world exports for one period and measure.
/// Throws DegeneratePeriodError when world exports are zero.
double export_share(const Panel& panel, const std::string& country_id,
                    const Period& period, Measure measure);

/// Rest-of-World net imports over world gross imports. Net imports are
/// imports minus exports without flooring, so the ratio may be negative.
/// Throws DegeneratePeriodError when world gross imports are zero.
double nirw(const Panel& panel, const Period& period, Measure measure);

using DistanceFn =
    std::function<double(const Country&, const Country&)>;

/// Real market potential: inverse-distance-weighted mean of the other
/// countries' GDP per capita, weights normalized to sum to one.
double rmp(const Panel& panel, const std::string& country_id,
           const Period& period, const DistanceFn& distance);

struct LatLon {
  double lat = 0.0;
  double lon = 0.0;
};

/// Haversine great-circle distance, Earth radius 6371.0 km.
double great_circle_km(const LatLon& a, const LatLon& b);

/// Distance in degrees from the 30-50 degree absolute-latitude band;
/// zero inside the band.
double dist_lat_3050(double latitude_deg);

/// Quinquennial membership dummy from a count of years inside the window.
/// Fractional mode returns years/5; binary mode returns 1 iff years >= 3.
double membership_dummy(int years_in_window, DummyMode mode);

struct QuinqDummies {
  double q = 0.0;
  double q_x_ow = 0.0;
  double q_x_rw = 0.0;
};

/// First-quinquennium dummy and its OW / RW interactions.
QuinqDummies quinq_dummies(const Country& country, const Period& period);

/// Builds the full design matrix: one row per (country, period), regressors
/// in canonical order, interaction columns exact products of their parents.
DesignMatrix build_design(const Panel& panel, Measure measure, bool split,
                          DummyMode dummy_mode = DummyMode::Fractional);

/// Writes design.csv: header in canonical order, one row per observation.
void write_design_csv(const DesignMatrix& design,
                      const std::filesystem::path& path);

}  // namespace vinoreg

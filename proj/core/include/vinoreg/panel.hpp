#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace vinoreg {

enum class WorldClass { OldWorld, LatinNewWorld, AngloNewWorld, RestOfWorld };

inline bool is_new_world(WorldClass w) {
  return w == WorldClass::LatinNewWorld || w == WorldClass::AngloNewWorld;
}

/// "OW", "LNW", "ANW", "RW" -- the labels used in countries.csv.
std::string to_string(WorldClass w);
WorldClass world_from_string(const std::string& s);

inline constexpr int kNumPeriods = 9;

/// One of the nine quinquennia "1961-65" ... "2001-05".
struct Period {
  int index = 0;        // 0..8
  std::string label;    // e.g. "1981-85"

  static Period from_index(int index);
  static Period from_label(const std::string& label);
  static const std::array<std::string, kNumPeriods>& labels();
  /// First calendar year of the quinquennium (1961 + 5*index).
  int start_year() const { return 1961 + 5 * index; }

  friend bool operator==(const Period& a, const Period& b) {
    return a.index == b.index;
  }
};

struct Country {
  std::string id;
  std::string name;
  WorldClass world = WorldClass::RestOfWorld;
  double latitude = 0.0;     // signed degrees, [-90, 90]
  double longitude = 0.0;    // signed degrees, [-180, 180]
  double avg_temp = 0.0;     // annual mean, deg C
  double christ_ruler = 0.0; // in {0, 0.5, 1}
  double muslim_ruler = 0.0; // in {0, 0.5, 1}
  bool is_north_africa = false;
};

struct PanelObservation {
  std::string country_id;
  Period period;
  double export_vol = 0.0;  // kilolitres
  double export_val = 0.0;  // constant-currency units
  double import_vol = 0.0;
  double import_val = 0.0;
  double gdp_pc = 0.0;      // constant-currency per capita
  int eu_years = 0;         // years of EU membership inside 1968-1998, 0..5
  int euro_years = 0;       // years of Euro-zone membership inside 1999-2005, 0..5
};

struct GroupCounts {
  int n_ow = 0;
  int n_lnw = 0;
  int n_anw = 0;
  int n_rw = 0;
  int n_nw() const { return n_lnw + n_anw; }
  int total() const { return n_ow + n_lnw + n_anw + n_rw; }
};

/// A balanced country x period panel. Countries are sorted by id and
/// observations by (country_id, period index); immutable once loaded.
struct Panel {
  std::vector<Country> countries;
  std::vector<PanelObservation> observations;

  const Country* find_country(const std::string& id) const;
  const PanelObservation* find_observation(const std::string& id,
                                           int period_index) const;
  GroupCounts group_counts() const;
  /// Distinct period indices present, ascending.
  std::vector<int> periods_present() const;
};

struct Violation {
  std::string code;     // short machine-readable tag
  std::string message;  // human-readable description
};

struct ValidationReport {
  GroupCounts counts;
  std::array<int, kNumPeriods> period_coverage{};  // observations per period
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
  std::string summary() const;
};

/// Parses the two CSV files without enforcing panel invariants (structural
/// parse errors, unknown labels and duplicate keys still throw ParseError).
Panel load_panel_lenient(const std::filesystem::path& countries_csv,
                         const std::filesystem::path& panel_csv);

/// Strict load: lenient parse followed by validate_panel; throws DataError
/// listing every violation if the panel is not canonical-valid.
Panel load_panel(const std::filesystem::path& countries_csv,
                 const std::filesystem::path& panel_csv);

/// Checks every panel invariant and reports group counts, period coverage
/// and all violations found. Violations are data, not faults: never throws.
ValidationReport validate_panel(const Panel& panel);

/// Returns a copy where every country flagged is_north_africa is classed
/// OldWorld. Flows are untouched. Chart-2 exercise only, never estimation.
Panel reassign_north_africa(const Panel& panel);

/// Writes the two CSV files in the exact schema load_panel reads;
/// load_panel(save_panel(p)) reproduces p bit for bit.
void save_panel(const Panel& panel,
                const std::filesystem::path& countries_csv,
                const std::filesystem::path& panel_csv);

}  // namespace vinoreg

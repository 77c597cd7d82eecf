#include "vinoreg/panel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "csv.hpp"
#include "vinoreg/errors.hpp"

namespace vinoreg {

std::string to_string(WorldClass w) {
  switch (w) {
    case WorldClass::OldWorld: return "OW";
    case WorldClass::LatinNewWorld: return "LNW";
    case WorldClass::AngloNewWorld: return "ANW";
    case WorldClass::RestOfWorld: return "RW";
  }
  return "?";
}

WorldClass world_from_string(const std::string& s) {
  if (s == "OW") return WorldClass::OldWorld;
  if (s == "LNW") return WorldClass::LatinNewWorld;
  if (s == "ANW") return WorldClass::AngloNewWorld;
  if (s == "RW") return WorldClass::RestOfWorld;
  throw DataError("unknown world label '" + s + "' (expected OW/LNW/ANW/RW)");
}

const std::array<std::string, kNumPeriods>& Period::labels() {
  static const std::array<std::string, kNumPeriods> labels = {
      "1961-65", "1966-70", "1971-75", "1976-80", "1981-85",
      "1986-90", "1991-95", "1996-00", "2001-05"};
  return labels;
}

Period Period::from_index(int index) {
  if (index < 0 || index >= kNumPeriods)
    throw std::invalid_argument("period index out of range: " +
                                std::to_string(index));
  return Period{index, labels()[static_cast<std::size_t>(index)]};
}

Period Period::from_label(const std::string& label) {
  const auto& all = labels();
  auto it = std::find(all.begin(), all.end(), label);
  if (it == all.end())
    throw DataError("unknown period label '" + label + "'");
  return Period{static_cast<int>(it - all.begin()), label};
}

const Country* Panel::find_country(const std::string& id) const {
  auto it = std::lower_bound(
      countries.begin(), countries.end(), id,
      [](const Country& c, const std::string& key) { return c.id < key; });
  if (it == countries.end() || it->id != id) return nullptr;
  return &*it;
}

const PanelObservation* Panel::find_observation(const std::string& id,
                                                int period_index) const {
  auto key = std::make_pair(id, period_index);
  auto it = std::lower_bound(
      observations.begin(), observations.end(), key,
      [](const PanelObservation& o, const std::pair<std::string, int>& k) {
        return std::tie(o.country_id, o.period.index) < std::tie(k.first, k.second);
      });
  if (it == observations.end() || it->country_id != id ||
      it->period.index != period_index)
    return nullptr;
  return &*it;
}

GroupCounts Panel::group_counts() const {
  GroupCounts g;
  for (const auto& c : countries) {
    switch (c.world) {
      case WorldClass::OldWorld: ++g.n_ow; break;
      case WorldClass::LatinNewWorld: ++g.n_lnw; break;
      case WorldClass::AngloNewWorld: ++g.n_anw; break;
      case WorldClass::RestOfWorld: ++g.n_rw; break;
    }
  }
  return g;
}

std::vector<int> Panel::periods_present() const {
  std::set<int> seen;
  for (const auto& o : observations) seen.insert(o.period.index);
  return std::vector<int>(seen.begin(), seen.end());
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  out << "countries: " << counts.total() << " (OW " << counts.n_ow << ", NW "
      << counts.n_nw() << " = " << counts.n_lnw << " LNW + " << counts.n_anw
      << " ANW, RW " << counts.n_rw << ")\n";
  out << "period coverage:";
  for (int t = 0; t < kNumPeriods; ++t)
    out << " " << Period::labels()[static_cast<std::size_t>(t)] << "="
        << period_coverage[static_cast<std::size_t>(t)];
  out << "\nviolations: " << violations.size() << "\n";
  for (const auto& v : violations) out << "  [" << v.code << "] " << v.message << "\n";
  return out.str();
}

Panel load_panel_lenient(const std::filesystem::path& countries_csv,
                         const std::filesystem::path& panel_csv) {
  Panel panel;

  {
    csv::Table t = csv::read_file(countries_csv);
    const auto c_id = csv::column(t, "id");
    const auto c_name = csv::column(t, "name");
    const auto c_world = csv::column(t, "world");
    const auto c_lat = csv::column(t, "latitude");
    const auto c_lon = csv::column(t, "longitude");
    const auto c_temp = csv::column(t, "avg_temp");
    const auto c_christ = csv::column(t, "christ_ruler");
    const auto c_muslim = csv::column(t, "muslim_ruler");
    const auto c_na = csv::column(t, "is_north_africa");

    std::set<std::string> seen;
    for (const auto& row : t.rows) {
      Country c;
      c.id = row.fields[c_id];
      if (c.id.empty())
        throw ParseError(t.path, row.line_number, "empty country id");
      if (!seen.insert(c.id).second)
        throw ParseError(t.path, row.line_number,
                         "duplicate country id '" + c.id + "'");
      c.name = row.fields[c_name];
      try {
        c.world = world_from_string(row.fields[c_world]);
      } catch (const DataError& e) {
        throw ParseError(t.path, row.line_number, e.what());
      }
      c.latitude = csv::to_double(t, row, c_lat);
      c.longitude = csv::to_double(t, row, c_lon);
      c.avg_temp = csv::to_double(t, row, c_temp);
      c.christ_ruler = csv::to_double(t, row, c_christ);
      c.muslim_ruler = csv::to_double(t, row, c_muslim);
      c.is_north_africa = csv::to_bool(t, row, c_na);
      panel.countries.push_back(std::move(c));
    }
  }

  {
    csv::Table t = csv::read_file(panel_csv);
    const auto c_id = csv::column(t, "country_id");
    const auto c_period = csv::column(t, "period");
    const auto c_ev = csv::column(t, "export_vol");
    const auto c_exv = csv::column(t, "export_val");
    const auto c_iv = csv::column(t, "import_vol");
    const auto c_imv = csv::column(t, "import_val");
    const auto c_gdp = csv::column(t, "gdp_pc");
    const auto c_eu = csv::column(t, "eu_years");
    const auto c_euro = csv::column(t, "euro_years");

    std::set<std::pair<std::string, int>> seen;
    for (const auto& row : t.rows) {
      PanelObservation o;
      o.country_id = row.fields[c_id];
      try {
        o.period = Period::from_label(row.fields[c_period]);
      } catch (const DataError& e) {
        throw ParseError(t.path, row.line_number, e.what());
      }
      if (!seen.insert({o.country_id, o.period.index}).second)
        throw ParseError(t.path, row.line_number,
                         "duplicate (country, period) key (" + o.country_id +
                             ", " + o.period.label + ")");
      o.export_vol = csv::to_double(t, row, c_ev);
      o.export_val = csv::to_double(t, row, c_exv);
      o.import_vol = csv::to_double(t, row, c_iv);
      o.import_val = csv::to_double(t, row, c_imv);
      o.gdp_pc = csv::to_double(t, row, c_gdp);
      o.eu_years = csv::to_int(t, row, c_eu);
      o.euro_years = csv::to_int(t, row, c_euro);
      panel.observations.push_back(std::move(o));
    }
  }

  std::sort(panel.countries.begin(), panel.countries.end(),
            [](const Country& a, const Country& b) { return a.id < b.id; });
  std::sort(panel.observations.begin(), panel.observations.end(),
            [](const PanelObservation& a, const PanelObservation& b) {
              return std::tie(a.country_id, a.period.index) <
                     std::tie(b.country_id, b.period.index);
            });
  return panel;
}

namespace {

bool in_categorical_domain(double v) { return v == 0.0 || v == 0.5 || v == 1.0; }

void check_flow(std::vector<Violation>& out, const PanelObservation& o,
                const char* field, double v) {
  if (!std::isfinite(v) || v < 0.0)
    out.push_back({"flow_range",
                   o.country_id + "/" + o.period.label + ": " + field + " = " +
                       csv::format_double(v) + " must be finite and >= 0"});
}

}  // namespace

ValidationReport validate_panel(const Panel& panel) {
  ValidationReport report;
  report.counts = panel.group_counts();
  auto& out = report.violations;

  for (const auto& c : panel.countries) {
    if (!in_categorical_domain(c.christ_ruler))
      out.push_back({"categorical", c.id + ": christ_ruler = " +
                                        csv::format_double(c.christ_ruler) +
                                        " not in {0, 0.5, 1}"});
    if (!in_categorical_domain(c.muslim_ruler))
      out.push_back({"categorical", c.id + ": muslim_ruler = " +
                                        csv::format_double(c.muslim_ruler) +
                                        " not in {0, 0.5, 1}"});
    if (c.christ_ruler == 1.0 && c.muslim_ruler == 1.0)
      out.push_back({"categorical",
                     c.id + ": christ_ruler and muslim_ruler are both 1"});
    if (!std::isfinite(c.latitude) || std::abs(c.latitude) > 90.0)
      out.push_back({"coordinate", c.id + ": latitude out of [-90, 90]"});
    if (!std::isfinite(c.longitude) || std::abs(c.longitude) > 180.0)
      out.push_back({"coordinate", c.id + ": longitude out of [-180, 180]"});
    if (!std::isfinite(c.avg_temp))
      out.push_back({"temperature", c.id + ": avg_temp is not finite"});
  }

  std::set<std::string> known_ids;
  for (const auto& c : panel.countries) known_ids.insert(c.id);

  std::map<std::string, std::set<int>> coverage;
  for (const auto& o : panel.observations) {
    report.period_coverage[static_cast<std::size_t>(o.period.index)] += 1;
    coverage[o.country_id].insert(o.period.index);
    if (!known_ids.count(o.country_id))
      out.push_back({"unknown_country",
                     o.country_id + "/" + o.period.label +
                         ": country_id not present in the country table"});
    check_flow(out, o, "export_vol", o.export_vol);
    check_flow(out, o, "export_val", o.export_val);
    check_flow(out, o, "import_vol", o.import_vol);
    check_flow(out, o, "import_val", o.import_val);
    if (!std::isfinite(o.gdp_pc) || o.gdp_pc <= 0.0)
      out.push_back({"gdp_range", o.country_id + "/" + o.period.label +
                                      ": gdp_pc must be finite and > 0"});
    if (o.eu_years < 0 || o.eu_years > 5)
      out.push_back({"membership", o.country_id + "/" + o.period.label +
                                       ": eu_years not in 0..5"});
    if (o.euro_years < 0 || o.euro_years > 5)
      out.push_back({"membership", o.country_id + "/" + o.period.label +
                                       ": euro_years not in 0..5"});
  }

  // Balance: every country must cover all nine quinquennia exactly once.
  for (const auto& c : panel.countries) {
    auto it = coverage.find(c.id);
    const int have = it == coverage.end() ? 0 : static_cast<int>(it->second.size());
    if (have != kNumPeriods) {
      std::string missing;
      for (int t = 0; t < kNumPeriods; ++t) {
        if (it == coverage.end() || !it->second.count(t)) {
          if (!missing.empty()) missing += ", ";
          missing += Period::labels()[static_cast<std::size_t>(t)];
        }
      }
      out.push_back({"balance", c.id + ": missing periods " + missing});
    }
  }

  return report;
}

Panel load_panel(const std::filesystem::path& countries_csv,
                 const std::filesystem::path& panel_csv) {
  Panel panel = load_panel_lenient(countries_csv, panel_csv);
  ValidationReport report = validate_panel(panel);
  if (!report.valid()) {
    std::ostringstream msg;
    msg << "panel fails validation with " << report.violations.size()
        << " violation(s):\n";
    for (const auto& v : report.violations)
      msg << "  [" << v.code << "] " << v.message << "\n";
    throw DataError(msg.str());
  }
  return panel;
}

Panel reassign_north_africa(const Panel& panel) {
  Panel copy = panel;
  for (auto& c : copy.countries)
    if (c.is_north_africa) c.world = WorldClass::OldWorld;
  return copy;
}

void save_panel(const Panel& panel,
                const std::filesystem::path& countries_csv,
                const std::filesystem::path& panel_csv) {
  {
    std::ofstream out(countries_csv);
    if (!out)
      throw Error("cannot write " + countries_csv.string());
    out << "id,name,world,latitude,longitude,avg_temp,christ_ruler,"
           "muslim_ruler,is_north_africa\n";
    for (const auto& c : panel.countries) {
      out << c.id << ',' << c.name << ',' << to_string(c.world) << ','
          << csv::format_double(c.latitude) << ','
          << csv::format_double(c.longitude) << ','
          << csv::format_double(c.avg_temp) << ','
          << csv::format_double(c.christ_ruler) << ','
          << csv::format_double(c.muslim_ruler) << ','
          << (c.is_north_africa ? 1 : 0) << '\n';
    }
  }
  {
    std::ofstream out(panel_csv);
    if (!out)
      throw Error("cannot write " + panel_csv.string());
    out << "country_id,period,export_vol,export_val,import_vol,import_val,"
           "gdp_pc,eu_years,euro_years\n";
    for (const auto& o : panel.observations) {
      out << o.country_id << ',' << o.period.label << ','
          << csv::format_double(o.export_vol) << ','
          << csv::format_double(o.export_val) << ','
          << csv::format_double(o.import_vol) << ','
          << csv::format_double(o.import_val) << ','
          << csv::format_double(o.gdp_pc) << ',' << o.eu_years << ','
          << o.euro_years << '\n';
    }
  }
}

}  // namespace vinoreg

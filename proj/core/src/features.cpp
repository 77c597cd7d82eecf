#include "vinoreg/features.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <stdexcept>

#include "csv.hpp"
#include "vinoreg/errors.hpp"

namespace vinoreg {

std::string to_string(Measure m) {
  return m == Measure::Volume ? "volume" : "value";
}

Measure measure_from_string(const std::string& s) {
  if (s == "volume") return Measure::Volume;
  if (s == "value") return Measure::Value;
  throw std::invalid_argument("unknown measure '" + s +
                              "' (expected volume or value)");
}

namespace {

double exports_of(const PanelObservation& o, Measure m) {
  return m == Measure::Volume ? o.export_vol : o.export_val;
}

double imports_of(const PanelObservation& o, Measure m) {
  return m == Measure::Volume ? o.import_vol : o.import_val;
}

}  // namespace

std::vector<std::string> canonical_columns(bool split) {
  if (!split)
    return {"NIRW", "OW", "NW", "NIRW_x_OW", "NIRW_x_NW",
            "RMP", "EU68_98", "EURO99_05", "CHRIST_RULER", "MUSLIM_RULER",
            "DISTLAT3050", "AVERAGE_TEMP", "QUINQ61_65", "QUINQ61_65_x_OW",
            "QUINQ61_65_x_RW"};
  return {"NIRW", "OW", "LNW", "ANW", "NIRW_x_OW", "NIRW_x_LNW",
          "NIRW_x_ANW", "RMP", "EU68_98", "EURO99_05", "CHRIST_RULER",
          "MUSLIM_RULER", "DISTLAT3050", "AVERAGE_TEMP", "QUINQ61_65",
          "QUINQ61_65_x_OW", "QUINQ61_65_x_RW"};
}

double export_share(const Panel& panel, const std::string& country_id,
                    const Period& period, Measure measure) {
  double country = 0.0;
  double world = 0.0;
  bool found = false;
  for (const auto& o : panel.observations) {
    if (o.period.index != period.index) continue;
    const double e = exports_of(o, measure);
    world += e;
    if (o.country_id == country_id) {
      country = e;
      found = true;
    }
  }
  if (!found)
    throw DataError("export_share: no observation for (" + country_id + ", " +
                    period.label + ")");
  if (world <= 0.0)
    throw DegeneratePeriodError("export_share: world " + to_string(measure) +
                                " exports are zero in " + period.label);
  return country / world;
}

double nirw(const Panel& panel, const Period& period, Measure measure) {
  double rw_net_imports = 0.0;
  double world_gross_imports = 0.0;
  for (const auto& o : panel.observations) {
    if (o.period.index != period.index) continue;
    world_gross_imports += imports_of(o, measure);
    const Country* c = panel.find_country(o.country_id);
    if (c && c->world == WorldClass::RestOfWorld)
      rw_net_imports += imports_of(o, measure) - exports_of(o, measure);
  }
  if (world_gross_imports <= 0.0)
    throw DegeneratePeriodError("nirw: world " + to_string(measure) +
                                " gross imports are zero in " + period.label);
  return rw_net_imports / world_gross_imports;
}

double rmp(const Panel& panel, const std::string& country_id,
           const Period& period, const DistanceFn& distance) {
  const Country* self = panel.find_country(country_id);
  if (!self) throw DataError("rmp: unknown country '" + country_id + "'");

  double weighted = 0.0;
  double weight_sum = 0.0;
  for (const auto& other : panel.countries) {
    if (other.id == country_id) continue;
    const double d = distance(*self, other);
    if (!(d > 0.0))
      throw NumericError("rmp: non-positive distance between " + country_id +
                         " and " + other.id + " (coincident coordinates?)");
    const PanelObservation* obs =
        panel.find_observation(other.id, period.index);
    if (!obs)
      throw DataError("rmp: missing observation for (" + other.id + ", " +
                      period.label + ")");
    weighted += obs->gdp_pc / d;
    weight_sum += 1.0 / d;
  }
  if (weight_sum <= 0.0)
    throw DataError("rmp: no partner countries for '" + country_id + "'");
  return weighted / weight_sum;
}

double great_circle_km(const LatLon& a, const LatLon& b) {
  constexpr double kEarthRadiusKm = 6371.0;
  constexpr double deg = std::numbers::pi / 180.0;
  const double lat1 = a.lat * deg;
  const double lat2 = b.lat * deg;
  const double dlat = (b.lat - a.lat) * deg;
  const double dlon = (b.lon - a.lon) * deg;
  const double s1 = std::sin(0.5 * dlat);
  const double s2 = std::sin(0.5 * dlon);
  const double h = s1 * s1 + std::cos(lat1) * std::cos(lat2) * s2 * s2;
  return 2.0 * kEarthRadiusKm * std::asin(std::min(1.0, std::sqrt(h)));
}

double dist_lat_3050(double latitude_deg) {
  if (std::abs(latitude_deg) > 90.0)
    throw std::invalid_argument("latitude out of [-90, 90]");
  const double a = std::abs(latitude_deg);
  if (a > 50.0) return a - 50.0;
  if (a < 30.0) return 30.0 - a;
  return 0.0;
}

double membership_dummy(int years_in_window, DummyMode mode) {
  if (years_in_window < 0 || years_in_window > 5)
    throw std::invalid_argument("years_in_window must be in 0..5, got " +
                                std::to_string(years_in_window));
  if (mode == DummyMode::Binary) return years_in_window >= 3 ? 1.0 : 0.0;
  return years_in_window / 5.0;
}

QuinqDummies quinq_dummies(const Country& country, const Period& period) {
  QuinqDummies d;
  d.q = period.label == "1961-65" ? 1.0 : 0.0;
  d.q_x_ow = d.q * (country.world == WorldClass::OldWorld ? 1.0 : 0.0);
  d.q_x_rw = d.q * (country.world == WorldClass::RestOfWorld ? 1.0 : 0.0);
  return d;
}

DesignMatrix build_design(const Panel& panel, Measure measure, bool split,
                          DummyMode dummy_mode) {
  DesignMatrix design;
  design.measure = measure;
  design.split = split;
  design.groups = panel.group_counts();
  design.column_names = canonical_columns(split);
  design.n_countries = panel.countries.size();

  const auto periods = panel.periods_present();

  // Period-level series shared across countries.
  std::map<int, double> nirw_by_period;
  for (int t : periods)
    nirw_by_period[t] = nirw(panel, Period::from_index(t), measure);

  // Pairwise great-circle distances, indexed by country order.
  const std::size_t n = panel.countries.size();
  std::vector<double> dist(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto& a = panel.countries[i];
      const auto& b = panel.countries[j];
      const double d = great_circle_km({a.latitude, a.longitude},
                                       {b.latitude, b.longitude});
      dist[i * n + j] = d;
      dist[j * n + i] = d;
    }
  }

  // World export totals per period for the shares.
  std::map<int, double> world_exports;
  for (const auto& o : panel.observations)
    world_exports[o.period.index] += exports_of(o, measure);
  for (int t : periods) {
    if (world_exports[t] <= 0.0)
      throw DegeneratePeriodError(
          "build_design: world exports are zero in " +
          Period::labels()[static_cast<std::size_t>(t)]);
  }

  std::map<std::string, std::size_t> country_index;
  for (std::size_t i = 0; i < n; ++i) country_index[panel.countries[i].id] = i;

  design.rows.reserve(panel.observations.size());
  for (const auto& obs : panel.observations) {
    const auto idx_it = country_index.find(obs.country_id);
    if (idx_it == country_index.end())
      throw DataError("build_design: unknown country '" + obs.country_id + "'");
    const std::size_t ci = idx_it->second;
    const Country& country = panel.countries[ci];

    DesignRow row;
    row.country_id = obs.country_id;
    row.period = obs.period;
    row.y = exports_of(obs, measure) / world_exports[obs.period.index];

    // RMP from the precomputed distance matrix: weighted mean of partner
    // GDP per capita, weights 1/d renormalized.
    double weighted = 0.0;
    double weight_sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == ci) continue;
      const double d = dist[ci * n + j];
      if (!(d > 0.0))
        throw NumericError("build_design: coincident coordinates for " +
                           country.id + " and " + panel.countries[j].id);
      const PanelObservation* partner =
          panel.find_observation(panel.countries[j].id, obs.period.index);
      if (!partner)
        throw DataError("build_design: missing observation for (" +
                        panel.countries[j].id + ", " + obs.period.label + ")");
      weighted += partner->gdp_pc / d;
      weight_sum += 1.0 / d;
    }
    if (weight_sum <= 0.0)
      throw DataError("build_design: no partner countries for '" +
                      country.id + "' (market potential undefined)");
    const double market_potential = weighted / weight_sum;

    const double nirw_t = nirw_by_period[obs.period.index];
    const double ow = country.world == WorldClass::OldWorld ? 1.0 : 0.0;
    const double nw = is_new_world(country.world) ? 1.0 : 0.0;
    const double lnw = country.world == WorldClass::LatinNewWorld ? 1.0 : 0.0;
    const double anw = country.world == WorldClass::AngloNewWorld ? 1.0 : 0.0;
    const double eu = membership_dummy(obs.eu_years, dummy_mode);
    const double euro = membership_dummy(obs.euro_years, dummy_mode);
    const QuinqDummies q = quinq_dummies(country, obs.period);

    auto& x = row.x;
    x.reserve(design.n_columns());
    x.push_back(nirw_t);
    x.push_back(ow);
    if (!split) {
      x.push_back(nw);
      x.push_back(nirw_t * ow);
      x.push_back(nirw_t * nw);
    } else {
      x.push_back(lnw);
      x.push_back(anw);
      x.push_back(nirw_t * ow);
      x.push_back(nirw_t * lnw);
      x.push_back(nirw_t * anw);
    }
    x.push_back(market_potential);
    x.push_back(eu);
    x.push_back(euro);
    x.push_back(country.christ_ruler);
    x.push_back(country.muslim_ruler);
    x.push_back(dist_lat_3050(country.latitude));
    x.push_back(country.avg_temp);
    x.push_back(q.q);
    x.push_back(q.q_x_ow);
    x.push_back(q.q_x_rw);

    design.rows.push_back(std::move(row));
  }

  return design;
}

void write_design_csv(const DesignMatrix& design,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "country_id,period,y";
  for (const auto& name : design.column_names) out << ',' << name;
  out << '\n';
  for (const auto& row : design.rows) {
    out << row.country_id << ',' << row.period.label << ','
        << csv::format_double(row.y);
    for (double v : row.x) out << ',' << csv::format_double(v);
    out << '\n';
  }
}

}  // namespace vinoreg

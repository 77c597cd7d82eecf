#include "vinoreg/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "vinoreg/errors.hpp"
#include "vinoreg/normal.hpp"

namespace vinoreg {

StarConvention StarConvention::paper() {
  return StarConvention{{{0.01, "*"}, {0.05, "**"}, {0.10, "***"}}};
}

StarConvention StarConvention::conventional() {
  return StarConvention{{{0.01, "***"}, {0.05, "**"}, {0.10, "*"}}};
}

std::string StarConvention::stars(double p) const {
  if (!std::isfinite(p)) return "";
  for (const auto& [threshold, marker] : thresholds)
    if (p < threshold) return marker;
  return "";
}

TableFormat table_format_from_string(const std::string& s) {
  if (s == "text") return TableFormat::Text;
  if (s == "markdown") return TableFormat::Markdown;
  if (s == "csv") return TableFormat::Csv;
  throw std::invalid_argument("unknown table format '" + s +
                              "' (expected text, markdown or csv)");
}

namespace {

std::string display_name(const std::string& column) {
  static const std::map<std::string, std::string> names = {
      {"NIRW_x_OW", "NIRW x OW"},       {"NIRW_x_NW", "NIRW x NW"},
      {"NIRW_x_LNW", "NIRW x LNW"},     {"NIRW_x_ANW", "NIRW x ANW"},
      {"EU68_98", "EU 68-98"},          {"EURO99_05", "EURO 99-05"},
      {"CHRIST_RULER", "CHRIST RULER"}, {"MUSLIM_RULER", "MUSLIM RULER"},
      {"DISTLAT3050", "DIST LAT3050"},  {"AVERAGE_TEMP", "AVERAGE TEMP"},
      {"QUINQ61_65", "QUINQ61-65"},     {"QUINQ61_65_x_OW", "QUINQ61-65_x_OW"},
      {"QUINQ61_65_x_RW", "QUINQ61-65_x_RW"}};
  auto it = names.find(column);
  return it == names.end() ? column : it->second;
}

std::string fixed3(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  std::string s = buf;
  if (s == "-0.000") s = "0.000";
  return s;
}

struct Cell {
  std::string estimate;  // value plus star suffix
  std::string se;        // parenthesized
};

Cell make_cell(double estimate, double se, const StarConvention& convention) {
  Cell cell;
  std::string stars;
  if (std::isfinite(se) && se > 0.0)
    stars = convention.stars(two_sided_p(estimate / se));
  cell.estimate = fixed3(estimate) + stars;
  cell.se = std::isfinite(se) ? "(" + fixed3(se) + ")" : "(n/a)";
  return cell;
}

std::string pad(const std::string& s, std::size_t width) {
  return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

}  // namespace

std::string render_table(const std::vector<const FitResult*>& results,
                         const StarConvention& convention, TableFormat format) {
  if (results.empty() || results.size() > 2)
    throw std::invalid_argument("render_table: expected one or two results");
  for (const auto* r : results) {
    if (!r) throw std::invalid_argument("render_table: null result");
    if (!r->converged)
      throw std::invalid_argument("render_table: fit did not converge");
  }
  if (results.size() == 2 &&
      results[0]->column_names != results[1]->column_names)
    throw std::invalid_argument(
        "render_table: results have different variable sets");

  const auto& columns = results[0]->column_names;
  struct Line {
    std::string name;
    std::vector<Cell> cells;
  };
  std::vector<Line> lines;

  for (std::size_t c = 0; c < columns.size(); ++c) {
    Line line;
    line.name = display_name(columns[c]);
    for (const auto* r : results)
      line.cells.push_back(make_cell(r->beta[c + 1], r->se[c + 1], convention));
    lines.push_back(std::move(line));
  }
  {
    Line line;
    line.name = "Constant";
    for (const auto* r : results)
      line.cells.push_back(make_cell(r->beta[0], r->se[0], convention));
    lines.push_back(std::move(line));
  }
  {
    Line line;
    line.name = "sigma_alpha";
    for (const auto* r : results)
      line.cells.push_back(
          Cell{fixed3(r->sigma_alpha), "(" + fixed3(r->se_sigma_alpha) + ")"});
    lines.push_back(std::move(line));
    line = Line{};
    line.name = "sigma_eps";
    for (const auto* r : results)
      line.cells.push_back(
          Cell{fixed3(r->sigma_eps), "(" + fixed3(r->se_sigma_eps) + ")"});
    lines.push_back(std::move(line));
  }
  std::vector<std::pair<std::string, std::vector<std::string>>> footer;
  {
    std::vector<std::string> ll, nn, cc, cens;
    for (const auto* r : results) {
      ll.push_back(fixed3(r->loglik));
      nn.push_back(std::to_string(r->n_obs));
      cc.push_back(std::to_string(r->n_countries));
      cens.push_back(std::to_string(r->n_censored));
    }
    footer.push_back({"Log-likelihood", ll});
    footer.push_back({"Observations", nn});
    footer.push_back({"Countries", cc});
    footer.push_back({"Left-censored", cens});
  }

  std::ostringstream out;
  if (format == TableFormat::Csv) {
    out << "variable";
    for (std::size_t i = 0; i < results.size(); ++i)
      out << ",estimate_" << i + 1 << ",se_" << i + 1;
    out << '\n';
    for (const auto& line : lines) {
      out << line.name;
      for (const auto& cell : line.cells)
        out << ',' << cell.estimate << ',' << cell.se;
      out << '\n';
    }
    for (const auto& [name, values] : footer) {
      out << name;
      for (const auto& v : values) out << ',' << v << ',';
      out << '\n';
    }
    return out.str();
  }

  // Shared layout for text and markdown: estimate and SE joined in a cell.
  std::vector<std::string> headers;
  for (std::size_t i = 0; i < results.size(); ++i)
    headers.push_back("(" + std::to_string(i + 1) + ")");

  auto joined = [](const Cell& cell) { return cell.estimate + " " + cell.se; };

  std::size_t name_width = 8;
  for (const auto& line : lines) name_width = std::max(name_width, line.name.size());
  for (const auto& [name, values] : footer)
    name_width = std::max(name_width, name.size());
  std::size_t cell_width = 8;
  for (const auto& line : lines)
    for (const auto& cell : line.cells)
      cell_width = std::max(cell_width, joined(cell).size());

  if (format == TableFormat::Markdown) {
    out << "| " << pad("Variable", name_width);
    for (const auto& h : headers) out << " | " << pad(h, cell_width);
    out << " |\n|" << std::string(name_width + 2, '-');
    for (std::size_t i = 0; i < headers.size(); ++i)
      out << '|' << std::string(cell_width + 2, '-');
    out << "|\n";
    for (const auto& line : lines) {
      out << "| " << pad(line.name, name_width);
      for (const auto& cell : line.cells)
        out << " | " << pad(joined(cell), cell_width);
      out << " |\n";
    }
    for (const auto& [name, values] : footer) {
      out << "| " << pad(name, name_width);
      for (const auto& v : values) out << " | " << pad(v, cell_width);
      out << " |\n";
    }
    return out.str();
  }

  out << pad("", name_width + 2);
  for (const auto& h : headers) out << pad(h, cell_width + 2);
  out << '\n';
  for (const auto& line : lines) {
    out << pad(line.name, name_width + 2);
    for (const auto& cell : line.cells) out << pad(joined(cell), cell_width + 2);
    out << '\n';
  }
  out << std::string(name_width + 2 + results.size() * (cell_width + 2), '-')
      << '\n';
  for (const auto& [name, values] : footer) {
    out << pad(name, name_width + 2);
    for (const auto& v : values) out << pad(v, cell_width + 2);
    out << '\n';
  }
  return out.str();
}

ChartData emit_chart_data(const Panel& panel, Measure measure,
                          bool north_africa_to_ow) {
  const auto periods = panel.periods_present();
  if (periods.empty()) throw DataError("emit_chart_data: empty panel");

  ChartData chart;
  ShareSeries ow{"OW", {}}, nw{"NW", {}}, rw{"RW", {}},
      rw_imports{"RW imports", {}}, ow_na{"OW+NA", {}};

  for (int t : periods) {
    const std::string& label = Period::labels()[static_cast<std::size_t>(t)];
    chart.period_labels.push_back(label);

    double world_exp = 0.0, world_imp = 0.0;
    double ow_exp = 0.0, nw_exp = 0.0, rw_exp = 0.0, na_exp = 0.0, rw_imp = 0.0;
    for (const auto& o : panel.observations) {
      if (o.period.index != t) continue;
      const Country* c = panel.find_country(o.country_id);
      if (!c) throw DataError("emit_chart_data: unknown country " + o.country_id);
      const double e = measure == Measure::Volume ? o.export_vol : o.export_val;
      const double m = measure == Measure::Volume ? o.import_vol : o.import_val;
      world_exp += e;
      world_imp += m;
      switch (c->world) {
        case WorldClass::OldWorld: ow_exp += e; break;
        case WorldClass::LatinNewWorld:
        case WorldClass::AngloNewWorld: nw_exp += e; break;
        case WorldClass::RestOfWorld: rw_exp += e; break;
      }
      if (c->is_north_africa || c->world == WorldClass::OldWorld) na_exp += e;
      if (c->world == WorldClass::RestOfWorld) rw_imp += m;
    }
    if (world_exp <= 0.0)
      throw DegeneratePeriodError("emit_chart_data: world exports zero in " + label);
    if (world_imp <= 0.0)
      throw DegeneratePeriodError("emit_chart_data: world imports zero in " + label);

    ow.values.push_back(ow_exp / world_exp);
    nw.values.push_back(nw_exp / world_exp);
    rw.values.push_back(rw_exp / world_exp);
    rw_imports.values.push_back(rw_imp / world_imp);
    ow_na.values.push_back(na_exp / world_exp);
  }

  chart.series.push_back(std::move(ow));
  chart.series.push_back(std::move(nw));
  chart.series.push_back(std::move(rw));
  chart.series.push_back(std::move(rw_imports));
  if (north_africa_to_ow) chart.series.push_back(std::move(ow_na));
  return chart;
}

void write_chart_csv(const ChartData& chart, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "period";
  for (const auto& s : chart.series) {
    std::string name = s.label;
    std::replace(name.begin(), name.end(), ' ', '_');
    out << ',' << name;
  }
  out << '\n';
  char buf[32];
  for (std::size_t t = 0; t < chart.period_labels.size(); ++t) {
    out << chart.period_labels[t];
    for (const auto& s : chart.series) {
      std::snprintf(buf, sizeof(buf), "%.12g", s.values[t]);
      out << ',' << buf;
    }
    out << '\n';
  }
}

void write_chart_svg(const ChartData& chart, const std::filesystem::path& path) {
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#9467bd", "#ff7f0e", "#8c564b"};
  const double width = 720, height = 440;
  const double left = 60, right = 160, top = 24, bottom = 48;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;

  double ymax = 0.0;
  for (const auto& s : chart.series)
    for (double v : s.values) ymax = std::max(ymax, v);
  if (ymax <= 0.0) ymax = 1.0;
  ymax *= 1.05;

  const std::size_t nt = chart.period_labels.size();
  auto xpos = [&](std::size_t t) {
    return nt > 1 ? left + plot_w * static_cast<double>(t) / (nt - 1)
                  : left + 0.5 * plot_w;
  };
  auto ypos = [&](double v) { return top + plot_h * (1.0 - v / ymax); };

  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  char buf[256];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' '
      << height << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Axes and horizontal gridlines with labels.
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                "stroke=\"black\"/>\n",
                left, top, left, top + plot_h);
  out << buf;
  std::snprintf(buf, sizeof(buf),
                "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                "stroke=\"black\"/>\n",
                left, top + plot_h, left + plot_w, top + plot_h);
  out << buf;
  for (int g = 0; g <= 4; ++g) {
    const double v = ymax * g / 4.0;
    std::snprintf(buf, sizeof(buf),
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"#dddddd\"/>\n",
                  left, ypos(v), left + plot_w, ypos(v));
    out << buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" "
                  "text-anchor=\"end\">%.2f</text>\n",
                  left - 6, ypos(v) + 4, v);
    out << buf;
  }
  for (std::size_t t = 0; t < nt; ++t) {
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" "
                  "text-anchor=\"middle\">%s</text>\n",
                  xpos(t), top + plot_h + 18, chart.period_labels[t].c_str());
    out << buf;
  }

  for (std::size_t s = 0; s < chart.series.size(); ++s) {
    const char* color = kPalette[s % 6];
    out << "<polyline fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"2\" points=\"";
    for (std::size_t t = 0; t < chart.series[s].values.size(); ++t) {
      std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", xpos(t),
                    ypos(chart.series[s].values[t]));
      out << buf;
    }
    out << "\"/>\n";
    const double ly = top + 16 + 18 * static_cast<double>(s);
    std::snprintf(buf, sizeof(buf),
                  "<rect x=\"%.1f\" y=\"%.1f\" width=\"12\" height=\"12\" "
                  "fill=\"%s\"/>\n",
                  left + plot_w + 16, ly - 10, color);
    out << buf;
    std::snprintf(buf, sizeof(buf),
                  "<text x=\"%.1f\" y=\"%.1f\" font-size=\"12\">%s</text>\n",
                  left + plot_w + 34, ly, chart.series[s].label.c_str());
    out << buf;
  }
  out << "</svg>\n";
}

void write_fit_json(const FitResult& result, const ModelSpec& spec,
                    const std::filesystem::path& path) {
  nlohmann::json j;
  j["spec"] = {
      {"measure", to_string(spec.measure)},
      {"split", spec.split},
      {"restriction_on", spec.restriction_on},
      {"quad_nodes", spec.quad_nodes},
      {"lower_limit", spec.lower_limit},
      {"upper_limit",
       spec.upper_limit ? nlohmann::json(*spec.upper_limit) : nlohmann::json()},
      {"max_iter", spec.max_iter},
      {"grad_tol", spec.grad_tol},
      {"seed_starts", spec.seed_starts},
      {"fix_sigma_alpha_zero", spec.fix_sigma_alpha_zero},
  };

  nlohmann::json coefs = nlohmann::json::array();
  auto add_coef = [&](const std::string& name, std::size_t k) {
    coefs.push_back({{"name", name},
                     {"estimate", result.beta[k]},
                     {"se", result.se[k]},
                     {"flagged", result.se_flagged.empty()
                                     ? false
                                     : static_cast<bool>(result.se_flagged[k])}});
  };
  add_coef("const", 0);
  for (std::size_t c = 0; c < result.column_names.size(); ++c)
    add_coef(result.column_names[c], c + 1);
  j["coefficients"] = std::move(coefs);

  j["sigma_alpha"] = result.sigma_alpha;
  j["sigma_alpha_se"] = result.se_sigma_alpha;
  j["sigma_eps"] = result.sigma_eps;
  j["sigma_eps_se"] = result.se_sigma_eps;
  j["loglik"] = result.loglik;
  j["convergence"] = {
      {"converged", result.converged},   {"iterations", result.iterations},
      {"gradient_norm", result.gradient_norm}, {"n_censored", result.n_censored},
      {"n_obs", result.n_obs},           {"n_countries", result.n_countries},
      {"hessian_warning", result.hessian_warning},
  };
  if (result.restriction) {
    const auto& r = *result.restriction;
    if (r.split) {
      j["restriction"] = {{"n_rw", r.n_rw},
                          {"n_ow", r.n_ow},
                          {"n_lnw", r.n_lnw},
                          {"n_anw", r.n_anw}};
    } else {
      j["restriction"] = {{"n_rw", r.n_rw}, {"n_ow", r.n_ow}, {"n_nw", r.n_nw}};
    }
  } else {
    j["restriction"] = nullptr;
  }
  j["covariance_beta"] = result.cov_beta;
  j["measure"] = to_string(result.measure);
  j["split"] = result.split;

  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

FitResult read_fit_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string(), 0, e.what());
  }

  FitResult result;
  try {
    result.measure = measure_from_string(j.at("measure").get<std::string>());
    result.split = j.at("split").get<bool>();
    for (const auto& coef : j.at("coefficients")) {
      const std::string name = coef.at("name").get<std::string>();
      if (name != "const") result.column_names.push_back(name);
      result.beta.push_back(coef.at("estimate").get<double>());
      const auto& se = coef.at("se");
      result.se.push_back(se.is_null()
                              ? std::numeric_limits<double>::quiet_NaN()
                              : se.get<double>());
      result.se_flagged.push_back(coef.value("flagged", false));
    }
    result.sigma_alpha = j.at("sigma_alpha").get<double>();
    result.sigma_eps = j.at("sigma_eps").get<double>();
    auto get_or_nan = [&](const char* key) {
      return j.at(key).is_null() ? std::numeric_limits<double>::quiet_NaN()
                                 : j.at(key).get<double>();
    };
    result.se_sigma_alpha = get_or_nan("sigma_alpha_se");
    result.se_sigma_eps = get_or_nan("sigma_eps_se");
    result.loglik = j.at("loglik").get<double>();
    const auto& conv = j.at("convergence");
    result.converged = conv.at("converged").get<bool>();
    result.iterations = conv.at("iterations").get<int>();
    result.gradient_norm = conv.at("gradient_norm").get<double>();
    result.n_censored = conv.at("n_censored").get<int>();
    result.n_obs = conv.at("n_obs").get<int>();
    result.n_countries = conv.at("n_countries").get<int>();
    result.hessian_warning = conv.value("hessian_warning", false);
    result.cov_beta =
        j.at("covariance_beta").get<std::vector<std::vector<double>>>();
    if (!j.at("restriction").is_null()) {
      const auto& r = j.at("restriction");
      if (r.contains("n_lnw")) {
        result.restriction = Restriction::four_group(
            r.at("n_rw").get<int>(), r.at("n_ow").get<int>(),
            r.at("n_lnw").get<int>(), r.at("n_anw").get<int>());
      } else {
        result.restriction = Restriction::three_group(r.at("n_rw").get<int>(),
                                                      r.at("n_ow").get<int>(),
                                                      r.at("n_nw").get<int>());
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(path.string(), 0, std::string("bad fit file: ") + e.what());
  }
  return result;
}

}  // namespace vinoreg

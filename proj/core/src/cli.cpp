#include "vinoreg/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vinoreg/errors.hpp"
#include "vinoreg/estimator.hpp"
#include "vinoreg/report.hpp"
#include "vinoreg/simulate.hpp"

namespace vinoreg {

namespace {

namespace fs = std::filesystem;

struct DataOptions {
  std::string countries;
  std::string panel;
};

/// Fills unset paths from $VINOREG_FIXTURE/{countries,panel}.csv.
void resolve_data_paths(DataOptions& data) {
  if (!data.countries.empty() && !data.panel.empty()) return;
  const char* fixture = std::getenv("VINOREG_FIXTURE");
  if (!fixture || !*fixture)
    throw Error(
        "no input data: pass --countries/--panel or set VINOREG_FIXTURE "
        "to the bundled data directory");
  if (data.countries.empty())
    data.countries = (fs::path(fixture) / "countries.csv").string();
  if (data.panel.empty())
    data.panel = (fs::path(fixture) / "panel.csv").string();
}

void add_data_options(CLI::App* cmd, DataOptions& data) {
  cmd->add_option("--countries", data.countries, "countries.csv path");
  cmd->add_option("--panel", data.panel, "panel.csv path");
}

struct FitOptions {
  DataOptions data;
  std::string measure = "volume";
  bool split = false;
  bool no_restriction = false;
  int quad_nodes = 12;
  std::optional<double> upper_limit;
  std::string dummy_mode = "fractional";
  int seed_starts = 5;
  int max_iter = 500;
  std::string format = "text";
  bool conventional_stars = false;
  std::string out_dir = ".";
};

void add_fit_options(CLI::App* cmd, FitOptions& opt) {
  add_data_options(cmd, opt.data);
  cmd->add_option("--measure", opt.measure, "volume or value")
      ->check(CLI::IsMember({"volume", "value"}));
  cmd->add_flag("--split", opt.split, "split the New World into LNW and ANW");
  cmd->add_flag("--no-restriction", opt.no_restriction,
                "drop the group-count restriction");
  cmd->add_option("--quad-nodes", opt.quad_nodes,
                  "Gauss-Hermite nodes for the random-effect integral");
  cmd->add_option("--upper-limit", opt.upper_limit,
                  "right-censor the share at this value");
  cmd->add_option("--dummy-mode", opt.dummy_mode,
                  "membership dummy convention")
      ->check(CLI::IsMember({"fractional", "binary"}));
  cmd->add_option("--seed-starts", opt.seed_starts, "number of multi-starts");
  cmd->add_option("--max-iter", opt.max_iter, "optimizer iteration budget");
  cmd->add_option("--format", opt.format, "table format")
      ->check(CLI::IsMember({"text", "markdown", "csv"}));
  cmd->add_flag("--conventional-stars", opt.conventional_stars,
                "use the usual star ordering (*** = 1%)");
  cmd->add_option("--out", opt.out_dir, "output directory");
}

DummyMode dummy_mode_from_string(const std::string& s) {
  return s == "binary" ? DummyMode::Binary : DummyMode::Fractional;
}

struct FitBundle {
  FitResult result;
  ModelSpec spec;
};

FitBundle run_fit_pipeline(FitOptions& opt) {
  resolve_data_paths(opt.data);
  Panel panel = load_panel(opt.data.countries, opt.data.panel);

  ModelSpec spec;
  spec.measure = measure_from_string(opt.measure);
  spec.split = opt.split;
  spec.restriction_on = !opt.no_restriction;
  spec.quad_nodes = opt.quad_nodes;
  spec.upper_limit = opt.upper_limit;
  spec.seed_starts = opt.seed_starts;
  spec.max_iter = opt.max_iter;

  DesignMatrix design = build_design(panel, spec.measure, spec.split,
                                     dummy_mode_from_string(opt.dummy_mode));
  FitResult result = fit(design, spec);
  return FitBundle{std::move(result), spec};
}

int command_validate(DataOptions& data) {
  resolve_data_paths(data);
  Panel panel = load_panel_lenient(data.countries, data.panel);
  ValidationReport report = validate_panel(panel);
  std::cout << report.summary();
  return report.valid() ? 0 : 1;
}

int command_features(FitOptions& opt) {
  resolve_data_paths(opt.data);
  Panel panel = load_panel(opt.data.countries, opt.data.panel);
  DesignMatrix design =
      build_design(panel, measure_from_string(opt.measure), opt.split,
                   dummy_mode_from_string(opt.dummy_mode));
  fs::create_directories(opt.out_dir);
  const fs::path out = fs::path(opt.out_dir) / "design.csv";
  write_design_csv(design, out);
  std::cout << "wrote " << out.string() << " (" << design.rows.size()
            << " rows x " << design.n_columns() << " regressors)\n";
  return 0;
}

int command_fit(FitOptions& opt) {
  FitBundle bundle = run_fit_pipeline(opt);
  const StarConvention convention = opt.conventional_stars
                                        ? StarConvention::conventional()
                                        : StarConvention::paper();
  const std::string table =
      render_table({&bundle.result}, convention,
                   table_format_from_string(opt.format));
  std::cout << table;

  fs::create_directories(opt.out_dir);
  const fs::path json_path = fs::path(opt.out_dir) / "fit.json";
  write_fit_json(bundle.result, bundle.spec, json_path);
  std::cout << "wrote " << json_path.string() << "\n";
  return 0;
}

int command_test_hypothesis(FitOptions& opt, const std::string& fit_file) {
  FitResult result;
  if (!fit_file.empty()) {
    result = read_fit_json(fit_file);
  } else {
    result = run_fit_pipeline(opt).result;
  }
  for (const auto& t : hypothesis_test(result)) {
    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "%s: delta = %.6f, se = %.6f, one-sided p = %.6f\n",
                  t.label.c_str(), t.delta, t.se_delta, t.one_sided_p);
    std::cout << buf;
  }
  return 0;
}

int command_simulate(const std::string& params_file, int reps,
                     std::uint64_t seed, const std::string& out_file,
                     FitOptions& opt) {
  TrueParams params = TrueParams::from_csv(params_file);

  ModelSpec spec;
  spec.measure = Measure::Volume;
  spec.split = params.split;
  spec.restriction_on = !opt.no_restriction;
  spec.quad_nodes = opt.quad_nodes;
  spec.seed_starts = opt.seed_starts;
  spec.max_iter = opt.max_iter;

  MonteCarloReport report = monte_carlo(params, reps, spec, seed);
  write_report_csv(report, out_file);
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "wrote %s (%d replications, %d failures, ordering rate %.3f)\n",
                out_file.c_str(), report.replications, report.failures,
                report.ordering_rate);
  std::cout << buf;
  return 0;
}

int command_charts(FitOptions& opt, bool na_to_ow, bool svg) {
  resolve_data_paths(opt.data);
  Panel panel = load_panel(opt.data.countries, opt.data.panel);
  ChartData chart =
      emit_chart_data(panel, measure_from_string(opt.measure), na_to_ow);
  fs::create_directories(opt.out_dir);
  const fs::path csv_path = fs::path(opt.out_dir) / "chart_shares.csv";
  write_chart_csv(chart, csv_path);
  std::cout << "wrote " << csv_path.string() << "\n";
  if (svg) {
    const fs::path svg_path = fs::path(opt.out_dir) / "chart_shares.svg";
    write_chart_svg(chart, svg_path);
    std::cout << "wrote " << svg_path.string() << "\n";
  }
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Wine-export share panel: features, censored random-effects "
               "fits, simulation and chart data"};
  app.set_config("--config", "", "key=value file presetting any flag");
  app.require_subcommand(1);

  DataOptions validate_data;
  CLI::App* validate = app.add_subcommand(
      "validate", "check a countries/panel CSV pair and print a report");
  add_data_options(validate, validate_data);

  FitOptions features_opt;
  CLI::App* features = app.add_subcommand(
      "features", "build the design matrix and write design.csv");
  add_fit_options(features, features_opt);

  FitOptions fit_opt;
  CLI::App* fit_cmd = app.add_subcommand(
      "fit", "estimate the censored random-effects model and print the table");
  add_fit_options(fit_cmd, fit_opt);

  FitOptions hyp_opt;
  std::string hyp_fit_file;
  CLI::App* hyp = app.add_subcommand(
      "test-hypothesis",
      "report delta = b_nirw_x_nw - b_nirw_x_ow with its SE and p-value");
  add_fit_options(hyp, hyp_opt);
  hyp->add_option("--fit", hyp_fit_file, "fit.json from a previous fit run");

  FitOptions sim_opt;
  std::string sim_params;
  int sim_reps = 100;
  std::uint64_t sim_seed = 1;
  std::string sim_out = "report.csv";
  CLI::App* sim = app.add_subcommand(
      "simulate", "Monte-Carlo parameter recovery from a params.csv");
  sim->add_option("--params", sim_params, "name,value parameter file")
      ->required();
  sim->add_option("--reps", sim_reps, "number of replications");
  sim->add_option("--seed", sim_seed, "master seed");
  sim->add_option("--out", sim_out, "report csv path");
  sim->add_flag("--no-restriction", sim_opt.no_restriction,
                "fit without the group restriction");
  sim->add_option("--quad-nodes", sim_opt.quad_nodes, "Gauss-Hermite nodes");
  sim->add_option("--seed-starts", sim_opt.seed_starts, "multi-starts per fit");
  sim->add_option("--max-iter", sim_opt.max_iter, "optimizer iteration budget");

  FitOptions chart_opt;
  bool na_to_ow = false;
  bool svg = false;
  CLI::App* charts = app.add_subcommand(
      "charts", "emit per-period share series (CSV, optionally SVG)");
  add_data_options(charts, chart_opt.data);
  charts->add_option("--measure", chart_opt.measure, "volume or value")
      ->check(CLI::IsMember({"volume", "value"}));
  charts->add_flag("--na-to-ow", na_to_ow,
                   "add the series counting North-African exports as Old World");
  charts->add_flag("--svg", svg, "also write a vector graphic");
  charts->add_option("--out", chart_opt.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (validate->parsed()) return command_validate(validate_data);
    if (features->parsed()) return command_features(features_opt);
    if (fit_cmd->parsed()) return command_fit(fit_opt);
    if (hyp->parsed()) return command_test_hypothesis(hyp_opt, hyp_fit_file);
    if (sim->parsed())
      return command_simulate(sim_params, sim_reps, sim_seed, sim_out, sim_opt);
    if (charts->parsed()) return command_charts(chart_opt, na_to_ow, svg);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace vinoreg

#include "vinoreg/simulate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <thread>

#include "csv.hpp"
#include "vinoreg/errors.hpp"

namespace vinoreg {

Restriction TrueParams::restriction() const {
  return split ? Restriction::four_group(n_rw, n_ow, n_lnw, n_anw)
               : Restriction::three_group(n_rw, n_ow, n_nw);
}

double TrueParams::restriction_residual() const {
  return restriction().residual(beta);
}

void TrueParams::validate() const {
  const std::size_t K = canonical_columns(split).size() + 1;
  if (beta.size() != K)
    throw DataError("TrueParams: beta must have " + std::to_string(K) +
                    " entries (intercept + regressors), got " +
                    std::to_string(beta.size()));
  for (double b : beta)
    if (!std::isfinite(b)) throw DataError("TrueParams: non-finite beta");
  if (!(sigma_alpha >= 0.0)) throw DataError("TrueParams: sigma_alpha < 0");
  if (!(sigma_eps > 0.0)) throw DataError("TrueParams: sigma_eps <= 0");
  if (n_rw <= 0 || n_ow <= 0 || (split ? (n_lnw <= 0 || n_anw <= 0) : n_nw <= 0))
    throw DataError("TrueParams: group sizes must be positive");
  if (n_periods < 1 || n_periods > kNumPeriods)
    throw DataError("TrueParams: n_periods must be in 1..9");
}

TrueParams TrueParams::from_csv(const std::filesystem::path& path) {
  csv::Table t = csv::read_file(path);
  const auto c_name = csv::column(t, "name");
  const auto c_value = csv::column(t, "value");

  std::map<std::string, double> kv;
  for (const auto& row : t.rows) {
    const std::string& key = row.fields[c_name];
    if (kv.count(key))
      throw ParseError(t.path, row.line_number, "duplicate key '" + key + "'");
    kv[key] = csv::to_double(t, row, c_value);
  }

  auto take = [&](const std::string& key, bool required, double fallback) {
    auto it = kv.find(key);
    if (it == kv.end()) {
      if (required) throw DataError(path.string() + ": missing key '" + key + "'");
      return fallback;
    }
    const double v = it->second;
    kv.erase(it);
    return v;
  };

  TrueParams p;
  p.split = kv.count("n_lnw") || kv.count("n_anw");
  p.n_rw = static_cast<int>(take("n_rw", true, 0));
  p.n_ow = static_cast<int>(take("n_ow", true, 0));
  if (p.split) {
    p.n_lnw = static_cast<int>(take("n_lnw", true, 0));
    p.n_anw = static_cast<int>(take("n_anw", true, 0));
  } else {
    p.n_nw = static_cast<int>(take("n_nw", true, 0));
  }
  p.n_periods = static_cast<int>(take("n_periods", false, kNumPeriods));
  p.sigma_alpha = take("sigma_alpha", true, 0.0);
  p.sigma_eps = take("sigma_eps", true, 0.0);
  p.censor_rate_hint = take("censor_rate_hint", false, 0.0);

  const auto columns = canonical_columns(p.split);
  p.beta.push_back(take("beta_const", true, 0.0));
  for (const auto& name : columns) {
    std::string key = "beta_" + name;
    std::transform(key.begin(), key.end(), key.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    p.beta.push_back(take(key, true, 0.0));
  }
  if (!kv.empty())
    throw DataError(path.string() + ": unknown key '" + kv.begin()->first + "'");
  p.validate();
  return p;
}

namespace {

WorldClass group_of(const TrueParams& p, int c) {
  if (c < p.n_ow) return WorldClass::OldWorld;
  if (p.split) {
    if (c < p.n_ow + p.n_lnw) return WorldClass::LatinNewWorld;
    if (c < p.n_ow + p.n_lnw + p.n_anw) return WorldClass::AngloNewWorld;
  } else {
    // Plain 3-group runs split NW half-and-half so group counts stay exact.
    if (c < p.n_ow + (p.n_nw + 1) / 2) return WorldClass::LatinNewWorld;
    if (c < p.n_ow + p.n_nw) return WorldClass::AngloNewWorld;
  }
  return WorldClass::RestOfWorld;
}

std::string country_label(int c) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "C%05d", c);
  return buf;
}

}  // namespace

GeneratedData generate_design(const TrueParams& params, std::uint64_t seed) {
  params.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const int N = params.n_countries();
  const int T = params.n_periods;
  const bool split = params.split;

  // Smooth increasing relative-demand series.
  std::vector<double> nirw_series(static_cast<std::size_t>(T));
  for (int t = 0; t < T; ++t)
    nirw_series[static_cast<std::size_t>(t)] =
        0.05 + 0.50 * (T > 1 ? static_cast<double>(t) / (T - 1) : 0.0);

  struct Static {
    WorldClass world;
    double rmp_base, rmp_growth;
    double eu_accession;  // period index, or T when never a member
    bool euro;
    double christ, muslim;
    double distlat, temp;
  };

  std::vector<Static> stat(static_cast<std::size_t>(N));
  for (int c = 0; c < N; ++c) {
    Static s;
    s.world = group_of(params, c);
    s.rmp_base = 0.5 + 2.0 * unif(rng);
    s.rmp_growth = 0.005 + 0.015 * unif(rng);

    const bool in_union = s.world == WorldClass::OldWorld && unif(rng) < 0.7;
    s.eu_accession = in_union ? 1 + static_cast<int>(unif(rng) * std::min(4, T - 1)) : T;
    s.euro = in_union && unif(rng) < 0.8;

    const double religion = unif(rng);
    if (s.world == WorldClass::RestOfWorld) {
      if (religion < 0.05) {
        s.christ = 0.5;
        s.muslim = 0.5;
      } else if (religion < 0.45) {
        s.christ = 1.0;
        s.muslim = 0.0;
      } else if (religion < 0.75) {
        s.christ = 0.0;
        s.muslim = 1.0;
      } else {
        s.christ = 0.0;
        s.muslim = 0.0;
      }
    } else {
      s.christ = religion < 0.75 ? 1.0 : 0.0;
      s.muslim = 0.0;
    }

    double latitude;
    switch (s.world) {
      case WorldClass::OldWorld: latitude = 36.0 + 16.0 * unif(rng); break;
      case WorldClass::LatinNewWorld: latitude = -40.0 + 20.0 * unif(rng); break;
      case WorldClass::AngloNewWorld:
        latitude = unif(rng) < 0.6 ? -42.0 + 14.0 * unif(rng)
                                   : 32.0 + 16.0 * unif(rng);
        break;
      default: latitude = -35.0 + 97.0 * unif(rng); break;
    }
    s.distlat = dist_lat_3050(latitude);
    s.temp = std::clamp(16.0 - 0.25 * (std::abs(latitude) - 30.0) + 3.0 * gauss(rng),
                        -2.0, 30.0);
    stat[static_cast<std::size_t>(c)] = s;
  }

  GeneratedData out;
  out.design.measure = Measure::Volume;
  out.design.split = split;
  out.design.column_names = canonical_columns(split);
  out.design.n_countries = static_cast<std::size_t>(N);
  out.design.groups.n_ow = params.n_ow;
  out.design.groups.n_rw = params.n_rw;
  out.design.groups.n_lnw = split ? params.n_lnw : (params.n_nw + 1) / 2;
  out.design.groups.n_anw = split ? params.n_anw : params.n_nw / 2;

  out.alpha.resize(static_cast<std::size_t>(N));
  for (int c = 0; c < N; ++c)
    out.alpha[static_cast<std::size_t>(c)] = params.sigma_alpha * gauss(rng);

  out.design.rows.reserve(static_cast<std::size_t>(N) * static_cast<std::size_t>(T));
  out.latent.reserve(out.design.rows.capacity());
  int n_censored = 0;

  for (int c = 0; c < N; ++c) {
    const Static& s = stat[static_cast<std::size_t>(c)];
    const double ow = s.world == WorldClass::OldWorld ? 1.0 : 0.0;
    const double lnw = s.world == WorldClass::LatinNewWorld ? 1.0 : 0.0;
    const double anw = s.world == WorldClass::AngloNewWorld ? 1.0 : 0.0;
    const double nw = lnw + anw;
    const double rw = s.world == WorldClass::RestOfWorld ? 1.0 : 0.0;

    for (int t = 0; t < T; ++t) {
      DesignRow row;
      row.country_id = country_label(c);
      row.period = Period::from_index(t);

      const double nirw_t = nirw_series[static_cast<std::size_t>(t)];
      double eu = 0.0;
      if (t >= s.eu_accession) {
        if (t == static_cast<int>(s.eu_accession)) eu = 0.6;
        else if (t == T - 1) eu = 0.0;
        else if (t == T - 2) eu = 0.6;
        else eu = 1.0;
      }
      double euro = 0.0;
      if (s.euro && T >= 2) {
        if (t == T - 2) euro = 0.4;
        else if (t == T - 1) euro = 1.0;
      }
      const double quinq = t == 0 ? 1.0 : 0.0;

      auto& x = row.x;
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
      x.push_back(s.rmp_base * std::pow(1.0 + s.rmp_growth, t));
      x.push_back(eu);
      x.push_back(euro);
      x.push_back(s.christ);
      x.push_back(s.muslim);
      x.push_back(s.distlat);
      x.push_back(s.temp);
      x.push_back(quinq);
      x.push_back(quinq * ow);
      x.push_back(quinq * rw);

      double xb = params.beta[0];
      for (std::size_t k = 0; k < x.size(); ++k) xb += params.beta[k + 1] * x[k];
      const double ystar =
          xb + out.alpha[static_cast<std::size_t>(c)] + params.sigma_eps * gauss(rng);
      out.latent.push_back(ystar);
      row.y = std::max(ystar, 0.0);
      if (row.y == 0.0) ++n_censored;

      out.design.rows.push_back(std::move(row));
    }
  }

  out.censor_fraction =
      static_cast<double>(n_censored) / static_cast<double>(out.design.rows.size());
  return out;
}

double oracle_loglik(std::span<const double> theta, const DesignMatrix& design,
                     double lower_limit) {
  if (design.n_countries > 50)
    throw SizeGuardError("oracle_loglik: guarded to <= 50 countries, got " +
                         std::to_string(design.n_countries));
  const std::size_t K = design.n_columns() + 1;
  if (theta.size() != K + 2)
    throw std::invalid_argument("oracle_loglik: theta must have " +
                                std::to_string(K + 2) + " entries");
  const double sigma_alpha = theta[K];
  const double sigma_eps = theta[K + 1];
  if (!(sigma_alpha >= 0.0) || !(sigma_eps > 0.0))
    throw std::invalid_argument("oracle_loglik: bad sigma parameters");

  const double sqrt2 = std::sqrt(2.0);
  const double log2pi = std::log(8.0 * std::atan(1.0));

  auto log_density = [&](double y, double mean) {
    if (y <= lower_limit) {
      const double z = (lower_limit - mean) / sigma_eps;
      return std::log(0.5 * std::erfc(-z / sqrt2));
    }
    const double u = (y - mean) / sigma_eps;
    return -std::log(sigma_eps) - 0.5 * log2pi - 0.5 * u * u;
  };

  // Rows are grouped by country; walk the group boundaries.
  double total = 0.0;
  std::size_t begin = 0;
  while (begin < design.rows.size()) {
    std::size_t end = begin;
    while (end < design.rows.size() &&
           design.rows[end].country_id == design.rows[begin].country_id)
      ++end;

    std::vector<double> xb(end - begin);
    for (std::size_t r = begin; r < end; ++r) {
      double m = theta[0];
      const auto& x = design.rows[r].x;
      for (std::size_t k = 0; k < x.size(); ++k) m += theta[k + 1] * x[k];
      xb[r - begin] = m;
    }

    if (sigma_alpha == 0.0) {
      for (std::size_t r = begin; r < end; ++r)
        total += log_density(design.rows[r].y, xb[r - begin]);
      begin = end;
      continue;
    }

    constexpr int kPoints = 10000;
    const double half_width = 8.0 * sigma_alpha;
    const double h = 2.0 * half_width / (kPoints - 1);
    const double log_gauss_norm =
        -0.5 * log2pi - std::log(sigma_alpha);

    double max_log = -std::numeric_limits<double>::infinity();
    std::vector<double> logg(kPoints);
    for (int k = 0; k < kPoints; ++k) {
      const double a = -half_width + h * k;
      double s = log_gauss_norm - 0.5 * (a / sigma_alpha) * (a / sigma_alpha);
      for (std::size_t r = begin; r < end; ++r)
        s += log_density(design.rows[r].y, xb[r - begin] + a);
      const double w = (k == 0 || k == kPoints - 1) ? 0.5 * h : h;
      logg[static_cast<std::size_t>(k)] = s + std::log(w);
      max_log = std::max(max_log, logg[static_cast<std::size_t>(k)]);
    }
    double acc = 0.0;
    for (double v : logg) acc += std::exp(v - max_log);
    total += max_log + std::log(acc);
    begin = end;
  }
  return total;
}

std::uint64_t replication_seed(std::uint64_t master, int rep) {
  // splitmix64 of master xor a golden-ratio counter stream.
  std::uint64_t x = master ^ (0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(rep) + 1));
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

MonteCarloReport monte_carlo(const TrueParams& params, int reps,
                             const ModelSpec& spec, std::uint64_t seed) {
  if (reps < 1) throw std::invalid_argument("monte_carlo: reps must be >= 1");
  params.validate();
  if (spec.restriction_on && std::abs(params.restriction_residual()) > 1e-8)
    throw DataError(
        "monte_carlo: true beta violates the group restriction while the "
        "fit imposes it");

  const std::size_t K = params.beta.size();
  const std::size_t P = K + 2;  // betas + sigmas
  const double z95 = 1.959963984540054;

  struct RepResult {
    bool ok = false;
    std::vector<double> estimate;
    std::vector<double> se;
    bool ordered = false;
  };
  std::vector<RepResult> results(static_cast<std::size_t>(reps));

  auto run_one = [&](int r) {
    RepResult out;
    try {
      GeneratedData data = generate_design(params, replication_seed(seed, r));
      FitResult fitres = fit(data.design, spec);
      out.estimate = fitres.beta;
      out.estimate.push_back(fitres.sigma_alpha);
      out.estimate.push_back(fitres.sigma_eps);
      out.se = fitres.se;
      out.se.push_back(fitres.se_sigma_alpha);
      out.se.push_back(fitres.se_sigma_eps);
      const auto tests = hypothesis_test(fitres);
      out.ordered = std::all_of(tests.begin(), tests.end(),
                                [](const HypothesisResult& t) { return t.delta > 0.0; });
      out.ok = true;
    } catch (const Error&) {
      out.ok = false;
    }
    results[static_cast<std::size_t>(r)] = std::move(out);
  };

  const unsigned hw = std::thread::hardware_concurrency();
  const int n_threads = std::max(1, std::min<int>(static_cast<int>(hw), reps));
  if (n_threads == 1) {
    for (int r = 0; r < reps; ++r) run_one(r);
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> workers;
    workers.reserve(static_cast<std::size_t>(n_threads));
    for (int w = 0; w < n_threads; ++w) {
      workers.emplace_back([&]() {
        for (int r = next.fetch_add(1); r < reps; r = next.fetch_add(1)) run_one(r);
      });
    }
    for (auto& th : workers) th.join();
  }

  MonteCarloReport report;
  report.replications = reps;
  report.names.push_back("const");
  for (const auto& c : canonical_columns(params.split)) report.names.push_back(c);
  report.names.push_back("sigma_alpha");
  report.names.push_back("sigma_eps");
  report.true_value = params.beta;
  report.true_value.push_back(params.sigma_alpha);
  report.true_value.push_back(params.sigma_eps);
  report.bias.assign(P, 0.0);
  report.rmse.assign(P, 0.0);
  report.coverage.assign(P, 0.0);

  std::vector<int> covered(P, 0), cover_total(P, 0);
  int ok_count = 0, ordered_count = 0;
  for (const auto& res : results) {
    if (!res.ok) {
      ++report.failures;
      continue;
    }
    ++ok_count;
    if (res.ordered) ++ordered_count;
    for (std::size_t j = 0; j < P; ++j) {
      const double err = res.estimate[j] - report.true_value[j];
      report.bias[j] += err;
      report.rmse[j] += err * err;
      if (std::isfinite(res.se[j]) && res.se[j] >= 0.0) {
        ++cover_total[j];
        if (std::abs(err) <= z95 * res.se[j]) ++covered[j];
      }
    }
  }
  if (ok_count == 0)
    throw ConvergenceError("monte_carlo: every replication failed to converge");
  for (std::size_t j = 0; j < P; ++j) {
    report.bias[j] /= ok_count;
    report.rmse[j] = std::sqrt(report.rmse[j] / ok_count);
    report.coverage[j] =
        cover_total[j] > 0 ? static_cast<double>(covered[j]) / cover_total[j] : 0.0;
  }
  report.ordering_rate = static_cast<double>(ordered_count) / ok_count;
  return report;
}

void write_report_csv(const MonteCarloReport& report,
                      const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "name,true_value,bias,rmse,coverage95\n";
  for (std::size_t j = 0; j < report.names.size(); ++j) {
    out << report.names[j] << ',' << csv::format_double(report.true_value[j])
        << ',' << csv::format_double(report.bias[j]) << ','
        << csv::format_double(report.rmse[j]) << ','
        << csv::format_double(report.coverage[j]) << '\n';
  }
  out << "failures," << report.failures << ",,,\n";
  out << "ordering_rate," << csv::format_double(report.ordering_rate) << ",,,\n";
}

}  // namespace vinoreg

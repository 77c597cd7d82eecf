#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vinoreg/estimator.hpp"

namespace vinoreg {

/// Ground-truth parameters for synthetic panel generation.
struct TrueParams {
  std::vector<double> beta;  // intercept first, canonical regressor order
  double sigma_alpha = 0.0;
  double sigma_eps = 1.0;
  int n_rw = 0;
  int n_ow = 0;
  int n_nw = 0;   // used when split == false
  int n_lnw = 0;  // used when split == true
  int n_anw = 0;
  bool split = false;
  int n_periods = kNumPeriods;
  double censor_rate_hint = 0.0;  // informational only

  int n_countries() const { return n_rw + n_ow + (split ? n_lnw + n_anw : n_nw); }
  Restriction restriction() const;
  /// Left-hand side of the group restriction on the true beta.
  double restriction_residual() const;
  void validate() const;

  /// Reads a name,value CSV (keys: group sizes, sigmas, beta_const and
  /// beta_<column> per canonical column).
  static TrueParams from_csv(const std::filesystem::path& path);
};

struct GeneratedData {
  DesignMatrix design;
  std::vector<double> alpha;    // per-country random effects, country order
  std::vector<double> latent;   // y* per row, row order
  double censor_fraction = 0.0;
};

/// Draws a synthetic design with the regressor structure of the wine panel:
/// a smooth increasing NIRW period series, time-invariant group dummies and
/// exact interaction products. y = max(y*, 0) with y* = x'beta + alpha + mu.
/// Deterministic for a given seed.
GeneratedData generate_design(const TrueParams& params, std::uint64_t seed);

/// Anti-drift oracle: the same log-likelihood as the estimator but with the
/// random-effect integral computed by a dense trapezoid rule over
/// [-8 sigma_alpha, 8 sigma_alpha] with 10^4 points. Left-censored at
/// lower_limit (default 0), no upper limit. Guarded to <= 50 countries.
double oracle_loglik(std::span<const double> theta, const DesignMatrix& design,
                     double lower_limit = 0.0);

struct MonteCarloReport {
  int replications = 0;  // requested
  int failures = 0;      // replications whose fit did not converge
  std::vector<std::string> names;  // intercept, regressors, sigmas
  std::vector<double> true_value;
  std::vector<double> bias;
  std::vector<double> rmse;
  std::vector<double> coverage;  // empirical coverage of nominal 95% CIs
  double ordering_rate = 0.0;    // fraction with b_nirw_x_nw > b_nirw_x_ow
};

/// Counter-based per-replication seed: splitmix64(master ^ (rep+1)*golden).
std::uint64_t replication_seed(std::uint64_t master, int rep);

/// Runs generate -> fit `reps` times and aggregates bias, RMSE, CI coverage
/// and the ordering rate. Replications run concurrently when hardware allows;
/// results are reduced in replication order, so the report is deterministic.
MonteCarloReport monte_carlo(const TrueParams& params, int reps,
                             const ModelSpec& spec, std::uint64_t seed);

/// report.csv: one row per parameter, footer rows for failures and the
/// ordering rate.
void write_report_csv(const MonteCarloReport& report,
                      const std::filesystem::path& path);

}  // namespace vinoreg

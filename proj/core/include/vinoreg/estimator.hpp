#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vinoreg/features.hpp"

namespace vinoreg {

/// Estimation settings for the left-censored random-effects model.
struct ModelSpec {
  Measure measure = Measure::Volume;
  bool split = false;
  bool restriction_on = true;
  int quad_nodes = 12;
  double lower_limit = 0.0;
  std::optional<double> upper_limit;
  int max_iter = 500;
  double grad_tol = 1e-6;
  int seed_starts = 5;
  /// Pins the random-effect scale to exactly zero (plain censored model).
  bool fix_sigma_alpha_zero = false;
};

/// Group sizes defining the linear restriction that ties the group-weighted
/// demand effects to zero: n_tot*b_nirw + n_ow*b_nirw_x_ow + n_nw*b_nirw_x_nw
/// (4-group form replaces the NW term with LNW and ANW terms).
struct Restriction {
  int n_rw = 0;
  int n_ow = 0;
  int n_nw = 0;   // 3-group form
  int n_lnw = 0;  // 4-group form
  int n_anw = 0;
  bool split = false;

  static Restriction three_group(int rw, int ow, int nw);
  static Restriction four_group(int rw, int ow, int lnw, int anw);
  static Restriction from_groups(const GroupCounts& g, bool split);

  int total() const { return n_rw + n_ow + (split ? n_lnw + n_anw : n_nw); }

  /// Beta index (intercept at 0) of each tied coefficient.
  int idx_nirw() const { return 1; }
  int idx_nirw_x_ow() const { return split ? 5 : 4; }
  int idx_nirw_x_nw() const { return 5; }
  int idx_nirw_x_lnw() const { return 6; }
  int idx_nirw_x_anw() const { return 7; }

  /// Left-hand side of the restriction evaluated on a full beta vector.
  double residual(std::span<const double> beta) const;
};

struct FitResult {
  Measure measure = Measure::Volume;
  bool split = false;
  std::vector<std::string> column_names;  // regressors, no intercept

  std::vector<double> beta;  // intercept first, then canonical order
  std::vector<double> se;    // aligned with beta; NaN when flagged
  std::vector<std::vector<double>> cov_beta;  // full covariance of beta
  std::vector<bool> se_flagged;               // per-beta reliability flags
  bool hessian_warning = false;

  double sigma_alpha = 0.0;
  double sigma_eps = 0.0;
  double se_sigma_alpha = 0.0;
  double se_sigma_eps = 0.0;

  double loglik = 0.0;
  bool converged = false;
  int iterations = 0;
  double gradient_norm = 0.0;
  int n_censored = 0;
  int n_obs = 0;
  int n_countries = 0;

  std::optional<Restriction> restriction;
};

/// Log-likelihood of the full parameter vector
/// theta = [beta_0..beta_K-1, sigma_alpha, sigma_eps] (sigmas on natural
/// scale, sigma_alpha >= 0, sigma_eps > 0). Censored observations contribute
/// cumulative mass, uncensored ones the density; the country random effect
/// is integrated by Gauss-Hermite quadrature with spec.quad_nodes nodes.
double loglik(std::span<const double> theta, const DesignMatrix& design,
              const ModelSpec& spec);

/// Same value, also writing the analytic gradient with respect to theta.
double loglik_with_gradient(std::span<const double> theta,
                            const DesignMatrix& design, const ModelSpec& spec,
                            std::vector<double>& grad);

/// Reconstructs the full parameter vector from the reduced one in which the
/// NIRW x OW coefficient has been eliminated through the restriction.
/// The reduced vector is the full vector with that single entry removed;
/// trailing non-beta entries (sigmas) pass through untouched.
std::vector<double> expand_restricted(std::span<const double> theta_free,
                                      const Restriction& restriction);

/// Maximum-likelihood fit: quasi-Newton ascent from an OLS warm start with
/// deterministic multi-start perturbations; returns the best converged
/// optimum with standard errors filled in.
FitResult fit(const DesignMatrix& design, const ModelSpec& spec);

struct StdErrors {
  std::vector<double> se_beta;
  std::vector<std::vector<double>> cov_beta;
  std::vector<bool> flagged;
  double se_sigma_alpha = 0.0;
  double se_sigma_eps = 0.0;
  bool warning = false;
};

/// Inverse observed information from a central-difference Hessian of the
/// log-likelihood in the reduced parameterization, mapped to the full
/// vector by the delta method. Directions with non-positive curvature are
/// flagged rather than inverted.
StdErrors standard_errors(const FitResult& result, const DesignMatrix& design,
                          const ModelSpec& spec);

struct HypothesisResult {
  std::string label;
  double delta = 0.0;
  double se_delta = 0.0;
  double one_sided_p = 0.0;  // P(delta <= 0 rejected): Phi(-delta/se)
};

/// Tests whether the demand-from-new-buyers effect is larger for new
/// producers than for incumbents: delta = b_nirw_x_nw - b_nirw_x_ow
/// (split models test LNW and ANW against OW pairwise).
std::vector<HypothesisResult> hypothesis_test(const FitResult& result);

}  // namespace vinoreg

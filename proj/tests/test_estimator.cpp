#include <Eigen/Dense>
#include <cmath>
#include <random>

#include <doctest.h>

#include "helpers.hpp"
#include "vinoreg/errors.hpp"
#include "vinoreg/estimator.hpp"
#include "vinoreg/normal.hpp"
#include "vinoreg/simulate.hpp"

using namespace vinoreg;
using testutil::tiny_design;

namespace {

/// Small generated panel with a censoring mix, shared across tests.
TrueParams small_params() {
  TrueParams p;
  p.n_rw = 4;
  p.n_ow = 3;
  p.n_nw = 2;
  p.n_periods = 5;
  p.sigma_alpha = 0.05;
  p.sigma_eps = 0.10;
  p.beta = {-0.02, -0.02, 0.06, 0.03, 0.02, 0.05, 0.01, 0.02,
            0.01,  0.02,  -0.03, -0.002, 0.001, 0.01, -0.01, 0.005};
  return p;
}

ModelSpec unrestricted_spec() {
  ModelSpec spec;
  spec.restriction_on = false;
  spec.seed_starts = 2;
  return spec;
}

Eigen::MatrixXd design_matrix_with_intercept(const DesignMatrix& design) {
  const int n = static_cast<int>(design.rows.size());
  const int K = static_cast<int>(design.n_columns()) + 1;
  Eigen::MatrixXd X(n, K);
  for (int r = 0; r < n; ++r) {
    X(r, 0) = 1.0;
    for (int k = 1; k < K; ++k)
      X(r, k) = design.rows[static_cast<std::size_t>(r)].x[static_cast<std::size_t>(k - 1)];
  }
  return X;
}

}  // namespace

TEST_CASE("loglik equals the plain Gaussian likelihood without censoring or RE") {
  auto design = tiny_design(
      {"X1"},
      {{"A", 0, 0.45, {1.0}}, {"A", 1, 0.70, {2.0}},
       {"B", 0, 0.30, {0.5}}, {"B", 1, 0.52, {1.5}}});
  ModelSpec spec = unrestricted_spec();

  const double b0 = 0.2, b1 = 0.15, sigma = 0.2;
  const std::vector<double> theta = {b0, b1, 0.0, sigma};

  double expected = 0.0;
  for (const auto& row : design.rows) {
    const double u = (row.y - b0 - b1 * row.x[0]) / sigma;
    expected += -std::log(sigma) - 0.5 * kLogTwoPi - 0.5 * u * u;
  }
  CHECK(loglik(theta, design, spec) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("a single censored observation at the mean contributes log(1/2)") {
  auto design = tiny_design({"X1"}, {{"A", 0, 0.0, {0.0}}});
  ModelSpec spec = unrestricted_spec();
  const std::vector<double> theta = {0.0, 0.0, 0.0, 1.0};
  CHECK(loglik(theta, design, spec) ==
        doctest::Approx(std::log(0.5)).epsilon(1e-14));
}

TEST_CASE("quadrature loglik matches the dense trapezoid oracle") {
  TrueParams p = small_params();
  p.n_rw = 1;
  p.n_ow = 1;
  p.n_nw = 1;
  p.n_periods = 4;
  ModelSpec spec = unrestricted_spec();

  for (std::uint64_t seed : {11u, 22u, 33u}) {
    const GeneratedData data = generate_design(p, seed);
    std::vector<double> theta = p.beta;
    theta.push_back(p.sigma_alpha);
    theta.push_back(p.sigma_eps);
    const double fast = loglik(theta, data.design, spec);
    const double dense = oracle_loglik(theta, data.design);
    CHECK(std::abs(fast - dense) < 1e-6);
  }
}

TEST_CASE("loglik is stable in the quadrature order") {
  const GeneratedData data = generate_design(small_params(), 5);
  std::vector<double> theta = small_params().beta;
  theta.push_back(0.05);
  theta.push_back(0.10);
  ModelSpec spec12 = unrestricted_spec();
  ModelSpec spec24 = unrestricted_spec();
  spec24.quad_nodes = 24;
  CHECK(std::abs(loglik(theta, data.design, spec12) -
                 loglik(theta, data.design, spec24)) < 1e-7);
}

TEST_CASE("analytic gradient agrees with central differences") {
  const GeneratedData data = generate_design(small_params(), 17);
  ModelSpec spec = unrestricted_spec();
  const std::size_t dim = data.design.n_columns() + 3;

  std::mt19937_64 rng(99);
  std::normal_distribution<double> beta_draw(0.0, 0.05);
  std::uniform_real_distribution<double> sigma_draw(0.08, 0.25);

  for (int point = 0; point < 10; ++point) {
    std::vector<double> theta(dim);
    for (std::size_t j = 0; j + 2 < dim; ++j) theta[j] = beta_draw(rng);
    theta[dim - 2] = sigma_draw(rng);
    theta[dim - 1] = sigma_draw(rng);

    std::vector<double> grad;
    loglik_with_gradient(theta, data.design, spec, grad);
    REQUIRE(grad.size() == dim);

    for (std::size_t j = 0; j < dim; ++j) {
      const double h = 6e-6 * std::max(1.0, std::abs(theta[j]));
      std::vector<double> plus = theta, minus = theta;
      plus[j] += h;
      minus[j] -= h;
      const double numeric =
          (loglik(plus, data.design, spec) - loglik(minus, data.design, spec)) /
          (2.0 * h);
      CHECK(std::abs(grad[j] - numeric) <=
            1e-5 * std::max(1.0, std::abs(grad[j])));
    }
  }
}

TEST_CASE("restriction expansion: homogeneous and direct-substitution cases") {
  const Restriction r = Restriction::three_group(25, 12, 10);

  // beta1 = 0, beta5 = 0 -> tied coefficient is 0.
  std::vector<double> reduced = {0.5, 0.0, 0.1, 0.2, 0.0, 0.3};
  auto full = expand_restricted(reduced, r);
  REQUIRE(full.size() == 7);
  CHECK(full[4] == 0.0);
  CHECK(full[0] == 0.5);
  CHECK(full[6] == 0.3);

  // beta1 = 1, beta5 = 0 -> tied coefficient is -47/12.
  reduced = {0.0, 1.0, 0.0, 0.0, 0.0, 0.0};
  full = expand_restricted(reduced, r);
  CHECK(full[4] == doctest::Approx(-47.0 / 12.0).epsilon(1e-15));
}

TEST_CASE("every expanded vector satisfies the restriction") {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> draw(-1.0, 1.0);

  const Restriction r3 = Restriction::three_group(25, 12, 10);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> reduced(8);
    for (auto& v : reduced) v = draw(rng);
    const auto full = expand_restricted(reduced, r3);
    CHECK(std::abs(r3.residual(full)) < 1e-14);
  }

  const Restriction r4 = Restriction::four_group(25, 12, 5, 5);
  for (int i = 0; i < 200; ++i) {
    std::vector<double> reduced(10);
    for (auto& v : reduced) v = draw(rng);
    const auto full = expand_restricted(reduced, r4);
    CHECK(std::abs(r4.residual(full)) < 1e-14);
  }
}

TEST_CASE("restriction rejects empty old-world groups") {
  CHECK_THROWS_AS(Restriction::three_group(25, 0, 10), std::invalid_argument);
}

TEST_CASE("uncensored fit with pinned sigma_alpha reproduces least squares") {
  TrueParams p = small_params();
  p.n_rw = 12;
  p.n_ow = 10;
  p.n_nw = 8;
  p.n_periods = 9;
  p.sigma_alpha = 0.0;
  p.sigma_eps = 0.05;
  p.beta[0] = 0.6;  // keeps every latent value above the censor floor

  const GeneratedData data = generate_design(p, 101);
  REQUIRE(data.censor_fraction == 0.0);

  ModelSpec spec = unrestricted_spec();
  spec.fix_sigma_alpha_zero = true;
  const FitResult result = fit(data.design, spec);
  CHECK(result.converged);
  CHECK(result.n_censored == 0);
  CHECK(result.sigma_alpha == 0.0);

  // Closed-form least squares, computed independently of the optimizer.
  const Eigen::MatrixXd X = design_matrix_with_intercept(data.design);
  Eigen::VectorXd y(X.rows());
  for (int r = 0; r < X.rows(); ++r) y(r) = data.design.rows[static_cast<std::size_t>(r)].y;
  const Eigen::VectorXd ols = (X.transpose() * X).ldlt().solve(X.transpose() * y);
  const double rss = (y - X * ols).squaredNorm();
  const double sigma2 = rss / static_cast<double>(X.rows());  // ML divisor
  const Eigen::MatrixXd cov = sigma2 * (X.transpose() * X).inverse();

  for (int k = 0; k < X.cols(); ++k) {
    CHECK(std::abs(result.beta[static_cast<std::size_t>(k)] - ols(k)) <=
          1e-6 * std::max(1.0, std::abs(ols(k))));
    const double se = std::sqrt(cov(k, k));
    CHECK(std::abs(result.se[static_cast<std::size_t>(k)] - se) <= 1e-4 * se);
  }
  CHECK(result.sigma_eps ==
        doctest::Approx(std::sqrt(sigma2)).epsilon(1e-5));
}

TEST_CASE("fitting is deterministic across reruns") {
  const GeneratedData data = generate_design(small_params(), 300);
  ModelSpec spec;
  spec.restriction_on = true;
  spec.seed_starts = 3;

  const FitResult a = fit(data.design, spec);
  const FitResult b = fit(data.design, spec);
  CHECK(a.loglik == b.loglik);
  CHECK(a.beta == b.beta);
  CHECK(a.se == b.se);
  CHECK(a.sigma_alpha == b.sigma_alpha);
}

TEST_CASE("restricted fits satisfy the group restriction to 1e-10") {
  TrueParams p = small_params();
  // True beta consistent with the restriction: 9*b1 + 3*b4 + 2*b5 = 0.
  p.beta[4] = (-(9.0 * p.beta[1]) - 2.0 * p.beta[5]) / 3.0;
  REQUIRE(std::abs(p.restriction_residual()) < 1e-12);

  const GeneratedData data = generate_design(p, 55);
  ModelSpec spec;
  spec.restriction_on = true;
  spec.seed_starts = 2;
  const FitResult result = fit(data.design, spec);
  REQUIRE(result.restriction.has_value());
  CHECK(std::abs(result.restriction->residual(result.beta)) < 1e-10);
}

TEST_CASE("coefficients are scale-equivariant in a regressor column") {
  TrueParams p = small_params();
  const GeneratedData base = generate_design(p, 77);

  GeneratedData scaled = base;
  constexpr double c = 4.0;
  constexpr std::size_t temp_col = 11;  // AVERAGE_TEMP
  for (auto& row : scaled.design.rows) row.x[temp_col] *= c;

  ModelSpec spec = unrestricted_spec();
  const FitResult f0 = fit(base.design, spec);
  const FitResult f1 = fit(scaled.design, spec);

  const double b0 = f0.beta[temp_col + 1];
  const double b1 = f1.beta[temp_col + 1];
  CHECK(std::abs(b1 - b0 / c) <= 1e-5 * std::max(1.0, std::abs(b0 / c)));
  // Other coefficients and the maximum are unchanged.
  CHECK(f1.loglik == doctest::Approx(f0.loglik).epsilon(1e-9));
  CHECK(f1.beta[0] == doctest::Approx(f0.beta[0]).epsilon(1e-5));
}

TEST_CASE("flat directions are flagged instead of silently inverted") {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> noise(0.0, 0.05);
  std::vector<std::tuple<std::string, int, double, std::vector<double>>> rows;
  for (int c = 0; c < 6; ++c) {
    for (int t = 0; t < 4; ++t) {
      const double x1 = 0.2 * c + 0.1 * t;
      const double y = 0.4 + 0.3 * x1 + noise(rng);
      rows.push_back({"C" + std::to_string(c), t, y, {x1, 0.0}});
    }
  }
  auto design = tiny_design({"X1", "ZERO"}, rows);
  ModelSpec spec = unrestricted_spec();
  spec.fix_sigma_alpha_zero = true;

  const FitResult result = fit(design, spec);
  CHECK(result.converged);
  CHECK(result.hessian_warning);
  REQUIRE(result.se_flagged.size() == 3);
  CHECK(!result.se_flagged[0]);
  CHECK(!result.se_flagged[1]);
  CHECK(result.se_flagged[2]);
  CHECK(std::isnan(result.se[2]));
  CHECK(std::isfinite(result.se[1]));
}

TEST_CASE("the tied coefficient's se matches a penalty-imposed refit") {
  // Restricted truth on groups (12, 6, 6): 24*b1 + 6*b4 + 6*b5 = 0.
  TrueParams p;
  p.n_rw = 12;
  p.n_ow = 6;
  p.n_nw = 6;
  p.n_periods = 6;
  p.sigma_alpha = 0.04;
  p.sigma_eps = 0.08;
  p.beta = {-0.01, -0.02, 0.06, 0.03, 0.03, 0.05, 0.01, 0.02,
            0.01,  0.02,  -0.03, -0.002, 0.001, 0.01, -0.01, 0.005};
  p.beta[4] = -(24.0 * p.beta[1] + 6.0 * p.beta[5]) / 6.0;
  REQUIRE(std::abs(p.restriction_residual()) < 1e-12);

  const GeneratedData data = generate_design(p, 2024);
  ModelSpec spec;
  spec.restriction_on = true;
  spec.seed_starts = 2;
  const FitResult result = fit(data.design, spec);
  REQUIRE(result.converged);
  REQUIRE(result.sigma_alpha > 5e-3);

  // Oracle: observed information of the *unrestricted* likelihood at the
  // restricted optimum, plus the penalty curvature 2*lambda*c*c', inverted.
  // As lambda grows this converges to the constrained covariance.
  const std::size_t K = result.beta.size();
  std::vector<double> theta = result.beta;
  theta.push_back(result.sigma_alpha);
  theta.push_back(result.sigma_eps);
  const std::size_t dim = theta.size();

  ModelSpec eval_spec = spec;
  auto f = [&](const std::vector<double>& t) {
    return loglik(t, data.design, eval_spec);
  };
  Eigen::MatrixXd hessian(dim, dim);
  std::vector<double> h(dim);
  for (std::size_t j = 0; j < dim; ++j)
    h[j] = 1e-4 * std::max(1.0, std::abs(theta[j]));
  const double f0 = f(theta);
  for (std::size_t j = 0; j < dim; ++j) {
    auto tp = theta, tm = theta;
    tp[j] += h[j];
    tm[j] -= h[j];
    hessian(static_cast<int>(j), static_cast<int>(j)) =
        (f(tp) - 2.0 * f0 + f(tm)) / (h[j] * h[j]);
  }
  for (std::size_t j = 0; j < dim; ++j) {
    for (std::size_t k = j + 1; k < dim; ++k) {
      auto tpp = theta, tpm = theta, tmp = theta, tmm = theta;
      tpp[j] += h[j]; tpp[k] += h[k];
      tpm[j] += h[j]; tpm[k] -= h[k];
      tmp[j] -= h[j]; tmp[k] += h[k];
      tmm[j] -= h[j]; tmm[k] -= h[k];
      const double v = (f(tpp) - f(tpm) - f(tmp) + f(tmm)) / (4.0 * h[j] * h[k]);
      hessian(static_cast<int>(j), static_cast<int>(k)) = v;
      hessian(static_cast<int>(k), static_cast<int>(j)) = v;
    }
  }

  Eigen::VectorXd constraint = Eigen::VectorXd::Zero(static_cast<int>(dim));
  constraint(1) = 24.0;  // d residual / d beta1
  constraint(4) = 6.0;   // d residual / d beta4
  constraint(5) = 6.0;   // d residual / d beta5

  const double lambda = 1e9;
  Eigen::MatrixXd info = -hessian + 2.0 * lambda * constraint * constraint.transpose();
  const Eigen::MatrixXd cov = info.inverse();

  const double se_pen_b4 = std::sqrt(cov(4, 4));
  const double se_fit_b4 = result.se[4];
  CHECK(std::abs(se_pen_b4 - se_fit_b4) <= 2e-3 * se_fit_b4);
  // A pass-through coefficient agrees as well.
  const double se_pen_b5 = std::sqrt(cov(5, 5));
  CHECK(std::abs(se_pen_b5 - result.se[5]) <= 2e-3 * result.se[5]);
  (void)K;
}

TEST_CASE("hypothesis test: null boundary and table-style values") {
  FitResult result;
  result.converged = true;
  result.split = false;
  result.column_names = canonical_columns(false);
  result.beta.assign(16, 0.0);
  result.se.assign(16, 0.1);
  result.cov_beta.assign(16, std::vector<double>(16, 0.0));
  for (int k = 0; k < 16; ++k) result.cov_beta[static_cast<std::size_t>(k)][static_cast<std::size_t>(k)] = 0.01;

  SUBCASE("equal coefficients sit on the null boundary") {
    result.beta[4] = 0.029;
    result.beta[5] = 0.029;
    const auto tests = hypothesis_test(result);
    REQUIRE(tests.size() == 1);
    CHECK(tests[0].delta == 0.0);
    CHECK(tests[0].one_sided_p == doctest::Approx(0.5).epsilon(1e-12));
  }

  SUBCASE("table-style values give a positive delta") {
    result.beta[4] = 0.029;
    result.beta[5] = 0.056;
    const auto tests = hypothesis_test(result);
    REQUIRE(tests.size() == 1);
    CHECK(tests[0].delta == doctest::Approx(0.027).epsilon(1e-12));
    CHECK(tests[0].delta > 0.0);
    CHECK(tests[0].one_sided_p < 0.5);
  }

  SUBCASE("missing covariance is an error") {
    result.cov_beta.clear();
    CHECK_THROWS_AS(hypothesis_test(result), Error);
  }
}

TEST_CASE("split fits test both new-world halves against the old world") {
  TrueParams p;
  p.split = true;
  p.n_rw = 6;
  p.n_ow = 4;
  p.n_lnw = 2;
  p.n_anw = 2;
  p.n_periods = 5;
  p.sigma_alpha = 0.03;
  p.sigma_eps = 0.08;
  p.beta.assign(18, 0.01);
  p.beta[0] = 0.05;
  p.beta[1] = -0.02;
  p.beta[6] = 0.04;  // NIRW x LNW
  p.beta[7] = 0.05;  // NIRW x ANW
  // 4-group restriction: 14*b1 + 4*b_ow + 2*b_lnw + 2*b_anw = 0.
  p.beta[5] = -(14.0 * p.beta[1] + 2.0 * p.beta[6] + 2.0 * p.beta[7]) / 4.0;
  REQUIRE(std::abs(p.restriction_residual()) < 1e-12);

  const GeneratedData data = generate_design(p, 4242);
  ModelSpec spec;
  spec.split = true;
  spec.restriction_on = true;
  spec.seed_starts = 2;
  const FitResult result = fit(data.design, spec);
  CHECK(result.converged);
  REQUIRE(result.beta.size() == 18);
  CHECK(std::abs(result.restriction->residual(result.beta)) < 1e-10);

  const auto tests = hypothesis_test(result);
  REQUIRE(tests.size() == 2);
  CHECK(tests[0].label == "NIRW_x_LNW - NIRW_x_OW");
  CHECK(tests[1].label == "NIRW_x_ANW - NIRW_x_OW");
}

TEST_CASE("loglik input validation") {
  const GeneratedData data = generate_design(small_params(), 1);
  ModelSpec spec = unrestricted_spec();

  std::vector<double> theta(data.design.n_columns() + 3, 0.0);
  theta.back() = 0.1;

  SUBCASE("wrong measure in the spec is rejected") {
    ModelSpec bad = spec;
    bad.measure = Measure::Value;
    CHECK_THROWS_AS(loglik(theta, data.design, bad), std::invalid_argument);
  }
  SUBCASE("wrong theta length is rejected") {
    std::vector<double> short_theta(4, 0.1);
    CHECK_THROWS_AS(loglik(short_theta, data.design, spec),
                    std::invalid_argument);
  }
  SUBCASE("negative sigma_eps is rejected") {
    theta.back() = -1.0;
    CHECK_THROWS_AS(loglik(theta, data.design, spec), std::invalid_argument);
  }
  SUBCASE("overflowing parameters raise a numeric error naming the country") {
    theta[0] = 1e308;
    try {
      loglik(theta, data.design, spec);
      FAIL("expected NumericError");
    } catch (const NumericError& e) {
      CHECK(std::string(e.what()).find("C0000") != std::string::npos);
    }
  }
}

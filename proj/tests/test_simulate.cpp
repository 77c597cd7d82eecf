#include <cmath>
#include <cstdio>

#include <doctest.h>

#include "helpers.hpp"
#include "vinoreg/errors.hpp"
#include "vinoreg/simulate.hpp"

using namespace vinoreg;

namespace {

TrueParams base_params() {
  TrueParams p;
  p.n_rw = 6;
  p.n_ow = 3;
  p.n_nw = 3;
  p.n_periods = 9;
  p.sigma_alpha = 0.04;
  p.sigma_eps = 0.08;
  p.beta = {-0.02, -0.02, 0.06, 0.03, 0.02, 0.05, 0.01, 0.02,
            0.01,  0.02,  -0.03, -0.002, 0.001, 0.01, -0.01, 0.005};
  // Make the truth consistent with the 3-group restriction.
  p.beta[4] = -(p.n_countries() * p.beta[1] + p.n_nw * p.beta[5]) / p.n_ow;
  return p;
}

}  // namespace

TEST_CASE("noiseless generation is exactly max(x beta, 0)") {
  TrueParams p = base_params();
  p.sigma_alpha = 0.0;
  p.sigma_eps = 1e-300;  // sigma_eps must stay positive
  const GeneratedData data = generate_design(p, 9);
  for (std::size_t r = 0; r < data.design.rows.size(); ++r) {
    const auto& row = data.design.rows[r];
    double xb = p.beta[0];
    for (std::size_t k = 0; k < row.x.size(); ++k) xb += p.beta[k + 1] * row.x[k];
    CHECK(row.y == std::max(xb, 0.0));
  }
}

TEST_CASE("generation is bytewise deterministic in the seed") {
  const TrueParams p = base_params();
  const GeneratedData a = generate_design(p, 123);
  const GeneratedData b = generate_design(p, 123);
  REQUIRE(a.design.rows.size() == b.design.rows.size());
  for (std::size_t r = 0; r < a.design.rows.size(); ++r) {
    CHECK(a.design.rows[r].country_id == b.design.rows[r].country_id);
    CHECK(a.design.rows[r].y == b.design.rows[r].y);
    CHECK(a.design.rows[r].x == b.design.rows[r].x);
  }
  CHECK(a.alpha == b.alpha);
  CHECK(a.latent == b.latent);
  CHECK(a.censor_fraction == b.censor_fraction);

  const GeneratedData c = generate_design(p, 124);
  CHECK(a.design.rows[0].y != c.design.rows[0].y);
}

TEST_CASE("a strongly negative intercept censors most of the panel") {
  TrueParams p = base_params();
  p.beta[0] = -0.5;
  const GeneratedData data = generate_design(p, 7);
  CHECK(data.censor_fraction > 0.8);
  int zeros = 0;
  for (const auto& row : data.design.rows)
    if (row.y == 0.0) ++zeros;
  CHECK(data.censor_fraction ==
        doctest::Approx(static_cast<double>(zeros) / data.design.rows.size()));
}

TEST_CASE("generated groups and dummies are structural") {
  const TrueParams p = base_params();
  const GeneratedData data = generate_design(p, 31);
  CHECK(data.design.groups.n_ow == p.n_ow);
  CHECK(data.design.groups.n_nw() == p.n_nw);
  CHECK(data.design.groups.n_rw == p.n_rw);
  for (const auto& row : data.design.rows) {
    CHECK(row.x[3] == row.x[0] * row.x[1]);  // NIRW x OW exact product
    CHECK(row.x[4] == row.x[0] * row.x[2]);
    CHECK((row.x[1] == 0.0 || row.x[1] == 1.0));
  }
  // NIRW is a smooth increasing period series.
  for (int t = 1; t < p.n_periods; ++t) {
    const auto& prev = data.design.rows[static_cast<std::size_t>(t - 1)];
    const auto& next = data.design.rows[static_cast<std::size_t>(t)];
    CHECK(next.x[0] > prev.x[0]);
  }
}

TEST_CASE("oracle collapses to the censored row sum when sigma_alpha is zero") {
  TrueParams p = base_params();
  p.n_rw = 2;
  p.n_ow = 1;
  p.n_nw = 1;
  p.n_periods = 3;
  const GeneratedData data = generate_design(p, 44);

  std::vector<double> theta = p.beta;
  theta.push_back(0.0);   // sigma_alpha
  theta.push_back(0.09);  // sigma_eps

  double expected = 0.0;
  for (const auto& row : data.design.rows) {
    double xb = theta[0];
    for (std::size_t k = 0; k < row.x.size(); ++k) xb += theta[k + 1] * row.x[k];
    if (row.y <= 0.0) {
      expected += std::log(0.5 * std::erfc((xb / 0.09) / std::sqrt(2.0)));
    } else {
      const double u = (row.y - xb) / 0.09;
      expected += -std::log(0.09) - 0.5 * std::log(2.0 * 3.14159265358979323846) -
                  0.5 * u * u;
    }
  }
  CHECK(oracle_loglik(theta, data.design) ==
        doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("oracle is invariant under mirroring with censoring disabled") {
  TrueParams p = base_params();
  p.n_rw = 2;
  p.n_ow = 1;
  p.n_nw = 1;
  p.n_periods = 4;
  p.beta[0] = 0.5;  // uncensored
  const GeneratedData data = generate_design(p, 60);
  REQUIRE(data.censor_fraction == 0.0);

  GeneratedData mirrored = data;
  for (auto& row : mirrored.design.rows) row.y = -row.y;

  std::vector<double> theta = p.beta;
  theta.push_back(p.sigma_alpha);
  theta.push_back(p.sigma_eps);
  std::vector<double> negated(theta.size());
  for (std::size_t j = 0; j + 2 < theta.size(); ++j) negated[j] = -theta[j];
  negated[theta.size() - 2] = theta[theta.size() - 2];
  negated[theta.size() - 1] = theta[theta.size() - 1];

  const double lower = -1e300;  // censoring off
  CHECK(oracle_loglik(theta, data.design, lower) ==
        doctest::Approx(oracle_loglik(negated, mirrored.design, lower))
            .epsilon(1e-10));
}

TEST_CASE("oracle refuses designs above its size guard") {
  TrueParams p = base_params();
  p.n_rw = 30;
  p.n_ow = 11;
  p.n_nw = 10;
  p.n_periods = 2;
  const GeneratedData data = generate_design(p, 5);
  std::vector<double> theta = p.beta;
  theta.push_back(p.sigma_alpha);
  theta.push_back(p.sigma_eps);
  CHECK_THROWS_AS(oracle_loglik(theta, data.design), SizeGuardError);
}

TEST_CASE("replication seeds form a deterministic counter-based stream") {
  CHECK(replication_seed(42, 0) == replication_seed(42, 0));
  CHECK(replication_seed(42, 0) != replication_seed(42, 1));
  CHECK(replication_seed(42, 1) != replication_seed(43, 1));
}

TEST_CASE("single-replication report equals that replication's errors") {
  const TrueParams p = base_params();
  ModelSpec spec;
  spec.restriction_on = true;
  spec.seed_starts = 2;

  const MonteCarloReport report = monte_carlo(p, 1, spec, 77);
  REQUIRE(report.failures == 0);

  const GeneratedData data = generate_design(p, replication_seed(77, 0));
  const FitResult fitres = fit(data.design, spec);

  REQUIRE(report.names.size() == p.beta.size() + 2);
  for (std::size_t j = 0; j < p.beta.size(); ++j) {
    const double err = fitres.beta[j] - p.beta[j];
    CHECK(report.bias[j] == doctest::Approx(err).epsilon(1e-12));
    CHECK(report.rmse[j] == doctest::Approx(std::abs(err)).epsilon(1e-12));
  }
  CHECK(report.ordering_rate == (fitres.beta[5] > fitres.beta[4] ? 1.0 : 0.0));
}

TEST_CASE("monte carlo is deterministic and writes the report schema") {
  const TrueParams p = base_params();
  ModelSpec spec;
  spec.restriction_on = true;
  spec.seed_starts = 2;

  const MonteCarloReport a = monte_carlo(p, 4, spec, 2023);
  const MonteCarloReport b = monte_carlo(p, 4, spec, 2023);
  CHECK(a.bias == b.bias);
  CHECK(a.rmse == b.rmse);
  CHECK(a.coverage == b.coverage);
  CHECK(a.ordering_rate == b.ordering_rate);

  testutil::TempDir dir;
  write_report_csv(a, dir / "report.csv");
  testutil::NaiveCsv csv(dir / "report.csv");
  REQUIRE(csv.header.size() == 5);
  CHECK(csv.header[0] == "name");
  // parameters + failures footer + ordering_rate footer
  CHECK(csv.rows.size() == a.names.size() + 2);
  CHECK(csv.rows.back()[0] == "ordering_rate");
}

TEST_CASE("rmse shrinks when the panel is four times wider") {
  TrueParams small = base_params();
  small.sigma_alpha = 0.02;
  small.sigma_eps = 0.06;
  TrueParams large = small;
  large.n_rw = small.n_rw * 4;
  large.n_ow = small.n_ow * 4;
  large.n_nw = small.n_nw * 4;
  // Proportional scaling keeps the same restriction hyperplane.
  REQUIRE(std::abs(large.restriction_residual()) < 1e-12);

  ModelSpec spec;
  spec.restriction_on = true;
  spec.seed_starts = 1;

  const int reps = 16;
  const MonteCarloReport rs = monte_carlo(small, reps, spec, 99);
  const MonteCarloReport rl = monte_carlo(large, reps, spec, 99);
  REQUIRE(rs.failures == 0);
  REQUIRE(rl.failures == 0);

  // Aggregate RMSE over the slope coefficients drops with more countries.
  double total_small = 0.0, total_large = 0.0;
  for (std::size_t j = 1; j + 2 < rs.names.size(); ++j) {
    total_small += rs.rmse[j];
    total_large += rl.rmse[j];
  }
  CHECK(total_large < total_small);
  // And the headline demand interactions shrink individually.
  CHECK(rl.rmse[4] < rs.rmse[4]);
  CHECK(rl.rmse[5] < rs.rmse[5]);
}

TEST_CASE("params csv round-trips and rejects unknown keys") {
  testutil::TempDir dir;
  std::string csv = "name,value\nn_rw,6\nn_ow,3\nn_nw,3\nn_periods,9\n"
                    "sigma_alpha,0.04\nsigma_eps,0.08\ncensor_rate_hint,0.3\n"
                    "beta_const,-0.02\nbeta_nirw,-0.02\nbeta_ow,0.06\n"
                    "beta_nw,0.03\nbeta_nirw_x_ow,0.02\nbeta_nirw_x_nw,0.05\n"
                    "beta_rmp,0.01\nbeta_eu68_98,0.02\nbeta_euro99_05,0.01\n"
                    "beta_christ_ruler,0.02\nbeta_muslim_ruler,-0.03\n"
                    "beta_distlat3050,-0.002\nbeta_average_temp,0.001\n"
                    "beta_quinq61_65,0.01\nbeta_quinq61_65_x_ow,-0.01\n"
                    "beta_quinq61_65_x_rw,0.005\n";
  testutil::write_file(dir / "params.csv", csv);
  const TrueParams p = TrueParams::from_csv(dir / "params.csv");
  CHECK(p.n_countries() == 12);
  CHECK(p.beta.size() == 16);
  CHECK(p.beta[0] == -0.02);
  CHECK(p.beta[5] == 0.05);
  CHECK(!p.split);

  testutil::write_file(dir / "bad.csv", csv + "beta_bogus,1\n");
  CHECK_THROWS_AS(TrueParams::from_csv(dir / "bad.csv"), DataError);

  testutil::write_file(dir / "missing.csv", "name,value\nn_rw,6\n");
  CHECK_THROWS_AS(TrueParams::from_csv(dir / "missing.csv"), DataError);
}

TEST_CASE("monte carlo refuses a truth that violates the imposed restriction") {
  TrueParams p = base_params();
  p.beta[4] = 1.0;  // off the restriction hyperplane
  ModelSpec spec;
  spec.restriction_on = true;
  CHECK_THROWS_AS(monte_carlo(p, 2, spec, 1), DataError);
}

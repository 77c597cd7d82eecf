#include "vinoreg/estimator.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "vinoreg/errors.hpp"
#include "vinoreg/normal.hpp"
#include "vinoreg/quadrature.hpp"

namespace vinoreg {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum class CensorStatus : std::int8_t { Uncensored = 0, Left = 1, Right = 2 };

/// Flattened design plus quadrature scratch; built once per fit and shared
/// by every likelihood evaluation.
class Evaluator {
 public:
  Evaluator(const DesignMatrix& design, const ModelSpec& spec)
      : quad_(gauss_hermite(spec.quad_nodes)),
        lower_(spec.lower_limit),
        upper_(spec.upper_limit) {
    if (design.rows.empty()) throw DataError("loglik: empty design");
    n_rows_ = static_cast<int>(design.rows.size());
    K_ = static_cast<int>(design.n_columns()) + 1;  // intercept

    X_.resize(n_rows_, K_);
    y_.resize(n_rows_);
    status_.resize(static_cast<std::size_t>(n_rows_));
    country_begin_.push_back(0);
    country_ids_.reserve(16);

    const std::string* current = nullptr;
    for (int r = 0; r < n_rows_; ++r) {
      const DesignRow& row = design.rows[static_cast<std::size_t>(r)];
      if (static_cast<int>(row.x.size()) + 1 != K_)
        throw DataError("loglik: ragged design row");
      X_(r, 0) = 1.0;
      for (int k = 1; k < K_; ++k) X_(r, k) = row.x[static_cast<std::size_t>(k - 1)];
      y_[static_cast<std::size_t>(r)] = row.y;
      CensorStatus s = CensorStatus::Uncensored;
      if (row.y <= lower_)
        s = CensorStatus::Left;
      else if (upper_ && row.y >= *upper_)
        s = CensorStatus::Right;
      status_[static_cast<std::size_t>(r)] = s;
      if (!current || row.country_id != *current) {
        if (current) country_begin_.push_back(r);
        country_ids_.push_back(row.country_id);
        current = &row.country_id;
      }
    }
    country_begin_.push_back(n_rows_);

    log_wq_.resize(quad_.nodes.size());
    const double half_log_pi = 0.5 * std::log(std::numbers::pi);
    for (std::size_t q = 0; q < quad_.weights.size(); ++q)
      log_wq_[q] = std::log(quad_.weights[q]) - half_log_pi;
  }

  int K() const { return K_; }
  int n_rows() const { return n_rows_; }
  int n_countries() const { return static_cast<int>(country_ids_.size()); }
  int n_censored() const {
    int n = 0;
    for (auto s : status_)
      if (s != CensorStatus::Uncensored) ++n;
    return n;
  }
  const std::string& country_id(int i) const {
    return country_ids_[static_cast<std::size_t>(i)];
  }

  /// theta = [beta..., sigma_alpha, sigma_eps]. Returns the log-likelihood;
  /// may be non-finite (the caller decides whether that is an error).
  /// When bad_country is non-null it receives the index of the first country
  /// whose contribution went non-finite, else -1.
  double value(std::span<const double> theta, int* bad_country = nullptr) const {
    return evaluate(theta, nullptr, bad_country);
  }

  double value_gradient(std::span<const double> theta, std::vector<double>& grad,
                        int* bad_country = nullptr) const {
    grad.assign(static_cast<std::size_t>(K_) + 2, 0.0);
    return evaluate(theta, &grad, bad_country);
  }

 private:
  double evaluate(std::span<const double> theta, std::vector<double>* grad,
                  int* bad_country) const {
    if (static_cast<int>(theta.size()) != K_ + 2)
      throw std::invalid_argument("loglik: theta must have " +
                                  std::to_string(K_ + 2) + " entries");
    const double sigma_alpha = theta[static_cast<std::size_t>(K_)];
    const double sigma_eps = theta[static_cast<std::size_t>(K_) + 1];
    if (bad_country) *bad_country = -1;
    if (!(sigma_alpha >= 0.0))
      throw std::invalid_argument("loglik: sigma_alpha must be >= 0");
    if (!(sigma_eps > 0.0))
      throw std::invalid_argument("loglik: sigma_eps must be > 0");

    const int Q = static_cast<int>(quad_.nodes.size());
    const Eigen::Map<const Eigen::VectorXd> beta(theta.data(), K_);
    Eigen::VectorXd xb = X_ * beta;

    const double log_se = std::log(sigma_eps);
    const double inv_se = 1.0 / sigma_eps;

    // Per-country scratch (worst-case T is small: one row per period).
    int max_T = 0;
    for (std::size_t i = 0; i + 1 < country_begin_.size(); ++i)
      max_T = std::max(max_T, country_begin_[i + 1] - country_begin_[i]);
    std::vector<double> S(static_cast<std::size_t>(Q));
    std::vector<double> dm;   // dlogf/dm per (t, q)
    std::vector<double> ds;   // dlogf/dsigma_eps per (t, q)
    if (grad) {
      dm.resize(static_cast<std::size_t>(max_T) * static_cast<std::size_t>(Q));
      ds.resize(static_cast<std::size_t>(max_T) * static_cast<std::size_t>(Q));
    }

    double total = 0.0;
    for (int i = 0; i + 1 < static_cast<int>(country_begin_.size()); ++i) {
      const int begin = country_begin_[static_cast<std::size_t>(i)];
      const int end = country_begin_[static_cast<std::size_t>(i) + 1];
      const int T = end - begin;

      for (int q = 0; q < Q; ++q) {
        const double shift =
            kSqrtTwo * sigma_alpha * quad_.nodes[static_cast<std::size_t>(q)];
        double s = 0.0;
        for (int t = 0; t < T; ++t) {
          const int r = begin + t;
          const double m = xb(r) + shift;
          const double yv = y_[static_cast<std::size_t>(r)];
          double logf, a = 0.0, b = 0.0;
          switch (status_[static_cast<std::size_t>(r)]) {
            case CensorStatus::Uncensored: {
              const double u = (yv - m) * inv_se;
              logf = -log_se - 0.5 * kLogTwoPi - 0.5 * u * u;
              if (grad) {
                a = u * inv_se;
                b = (u * u - 1.0) * inv_se;
              }
              break;
            }
            case CensorStatus::Left: {
              const double u = (lower_ - m) * inv_se;
              logf = log_norm_cdf(u);
              if (grad) {
                const double mills = mills_ratio(u);
                a = -mills * inv_se;
                b = -mills * u * inv_se;
              }
              break;
            }
            case CensorStatus::Right: {
              const double v = (m - *upper_) * inv_se;
              logf = log_norm_cdf(v);
              if (grad) {
                const double mills = mills_ratio(v);
                a = mills * inv_se;
                b = -mills * v * inv_se;
              }
              break;
            }
            default:
              logf = kNegInf;
          }
          s += logf;
          if (grad) {
            dm[static_cast<std::size_t>(t) * static_cast<std::size_t>(Q) +
               static_cast<std::size_t>(q)] = a;
            ds[static_cast<std::size_t>(t) * static_cast<std::size_t>(Q) +
               static_cast<std::size_t>(q)] = b;
          }
        }
        S[static_cast<std::size_t>(q)] = s + log_wq_[static_cast<std::size_t>(q)];
      }

      // log-sum-exp over the quadrature nodes.
      double smax = kNegInf;
      for (double v : S) smax = std::max(smax, v);
      double li;
      if (!std::isfinite(smax)) {
        li = smax;  // all-node underflow (or NaN) for this country
      } else {
        double acc = 0.0;
        for (double v : S) acc += std::exp(v - smax);
        li = smax + std::log(acc);
      }
      if (!std::isfinite(li)) {
        if (bad_country && *bad_country < 0) *bad_country = i;
        total += li;
        continue;
      }
      total += li;

      if (grad) {
        for (int q = 0; q < Q; ++q) {
          const double p = std::exp(S[static_cast<std::size_t>(q)] - li);
          if (p == 0.0) continue;
          double sum_a = 0.0;
          double sum_b = 0.0;
          for (int t = 0; t < T; ++t) {
            const std::size_t idx =
                static_cast<std::size_t>(t) * static_cast<std::size_t>(Q) +
                static_cast<std::size_t>(q);
            const double a = dm[idx];
            sum_a += a;
            sum_b += ds[idx];
            if (a != 0.0) {
              const int r = begin + t;
              const double w = p * a;
              for (int k = 0; k < K_; ++k)
                (*grad)[static_cast<std::size_t>(k)] += w * X_(r, k);
            }
          }
          (*grad)[static_cast<std::size_t>(K_)] +=
              p * sum_a * kSqrtTwo * quad_.nodes[static_cast<std::size_t>(q)];
          (*grad)[static_cast<std::size_t>(K_) + 1] += p * sum_b;
        }
      }
    }
    return total;
  }

  int n_rows_ = 0;
  int K_ = 0;
  Eigen::MatrixXd X_;
  std::vector<double> y_;
  std::vector<CensorStatus> status_;
  std::vector<int> country_begin_;
  std::vector<std::string> country_ids_;
  QuadratureRule quad_;
  std::vector<double> log_wq_;
  double lower_ = 0.0;
  std::optional<double> upper_;
};

/// Mapping between the optimizer's internal vector (reduced betas plus log
/// sigmas) and the full natural parameter vector.
struct ParamMap {
  int K = 0;                 // full beta dimension
  bool restricted = false;
  Restriction restriction;
  bool fix_sigma_alpha = false;

  int elim() const { return restriction.idx_nirw_x_ow(); }
  int n_beta_free() const { return restricted ? K - 1 : K; }
  int dim() const { return n_beta_free() + (fix_sigma_alpha ? 1 : 2); }

  std::vector<double> to_full(const Eigen::VectorXd& internal) const {
    std::vector<double> full;
    if (restricted) {
      std::vector<double> theta_free(internal.data(),
                                     internal.data() + n_beta_free());
      full = expand_restricted(theta_free, restriction);
    } else {
      full.assign(internal.data(), internal.data() + K);
    }
    full.push_back(fix_sigma_alpha
                       ? 0.0
                       : std::exp(internal(n_beta_free())));
    full.push_back(std::exp(internal(internal.size() - 1)));
    return full;
  }

  Eigen::VectorXd to_internal(std::span<const double> beta, double sigma_alpha,
                              double sigma_eps) const {
    Eigen::VectorXd internal(dim());
    int j = 0;
    for (int k = 0; k < K; ++k) {
      if (restricted && k == elim()) continue;
      internal(j++) = beta[static_cast<std::size_t>(k)];
    }
    if (!fix_sigma_alpha) internal(j++) = std::log(std::max(sigma_alpha, 1e-12));
    internal(j++) = std::log(sigma_eps);
    return internal;
  }

  /// Chain rule: gradient w.r.t. the full natural vector (K betas + two
  /// sigmas) to the internal parameterization.
  Eigen::VectorXd chain_gradient(const std::vector<double>& g_full,
                                 const std::vector<double>& theta_full) const {
    Eigen::VectorXd g(dim());
    const double g_elim =
        restricted ? g_full[static_cast<std::size_t>(elim())] : 0.0;
    int j = 0;
    for (int k = 0; k < K; ++k) {
      if (restricted && k == elim()) continue;
      double v = g_full[static_cast<std::size_t>(k)];
      if (restricted) {
        const auto& r = restriction;
        if (k == r.idx_nirw())
          v -= static_cast<double>(r.total()) / r.n_ow * g_elim;
        else if (!r.split && k == r.idx_nirw_x_nw())
          v -= static_cast<double>(r.n_nw) / r.n_ow * g_elim;
        else if (r.split && k == r.idx_nirw_x_lnw())
          v -= static_cast<double>(r.n_lnw) / r.n_ow * g_elim;
        else if (r.split && k == r.idx_nirw_x_anw())
          v -= static_cast<double>(r.n_anw) / r.n_ow * g_elim;
      }
      g(j++) = v;
    }
    const std::size_t K_sz = static_cast<std::size_t>(K);
    if (!fix_sigma_alpha)
      g(j++) = g_full[K_sz] * theta_full[K_sz];  // d/dlog sigma = sigma d/dsigma
    g(j++) = g_full[K_sz + 1] * theta_full[K_sz + 1];
    return g;
  }

  /// Jacobian of the full beta vector w.r.t. the free beta entries.
  Eigen::MatrixXd beta_jacobian() const {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(K, n_beta_free());
    int j = 0;
    for (int k = 0; k < K; ++k) {
      if (restricted && k == elim()) continue;
      J(k, j) = 1.0;
      if (restricted) {
        const auto& r = restriction;
        if (k == r.idx_nirw())
          J(elim(), j) = -static_cast<double>(r.total()) / r.n_ow;
        else if (!r.split && k == r.idx_nirw_x_nw())
          J(elim(), j) = -static_cast<double>(r.n_nw) / r.n_ow;
        else if (r.split && k == r.idx_nirw_x_lnw())
          J(elim(), j) = -static_cast<double>(r.n_lnw) / r.n_ow;
        else if (r.split && k == r.idx_nirw_x_anw())
          J(elim(), j) = -static_cast<double>(r.n_anw) / r.n_ow;
      }
      ++j;
    }
    return J;
  }
};

struct BfgsOutcome {
  Eigen::VectorXd x;
  double f = std::numeric_limits<double>::infinity();
  Eigen::VectorXd grad;
  int iterations = 0;
  bool converged = false;
};

/// Plain BFGS minimizer with backtracking Armijo line search. The objective
/// returns +inf outside the computable region; gradients are analytic.
template <typename Objective>
BfgsOutcome bfgs_minimize(const Objective& objective, Eigen::VectorXd x0,
                          int max_iter, double grad_tol) {
  const int n = static_cast<int>(x0.size());
  BfgsOutcome out;
  out.x = std::move(x0);

  Eigen::VectorXd g(n);
  double f = objective(out.x, &g);
  if (!std::isfinite(f)) {
    out.f = f;
    out.grad = g;
    return out;
  }

  Eigen::MatrixXd H = Eigen::MatrixXd::Identity(n, n);
  bool first_update = true;

  for (int iter = 0; iter < max_iter; ++iter) {
    out.iterations = iter;
    if (g.lpNorm<Eigen::Infinity>() <= grad_tol) {
      out.converged = true;
      break;
    }

    Eigen::VectorXd p = -(H * g);
    double slope = g.dot(p);
    if (!(slope < 0.0)) {
      H.setIdentity();
      p = -g;
      slope = g.dot(p);
    }

    // Backtracking Armijo search.
    constexpr double c1 = 1e-4;
    double step = 1.0;
    double f_new = std::numeric_limits<double>::infinity();
    Eigen::VectorXd x_new, g_new(n);
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      x_new = out.x + step * p;
      f_new = objective(x_new, &g_new);
      if (std::isfinite(f_new) && f_new <= f + c1 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
      if (step < 1e-18) break;
    }
    if (!accepted) break;  // no further progress along any tried step

    Eigen::VectorXd s = x_new - out.x;
    Eigen::VectorXd yv = g_new - g;
    const double sy = s.dot(yv);
    if (sy > 1e-12 * s.norm() * yv.norm()) {
      if (first_update) {
        H = (sy / yv.squaredNorm()) * Eigen::MatrixXd::Identity(n, n);
        first_update = false;
      }
      const double rho = 1.0 / sy;
      Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
      H = (I - rho * s * yv.transpose()) * H * (I - rho * yv * s.transpose()) +
          rho * s * s.transpose();
    }

    out.x = std::move(x_new);
    f = f_new;
    g = g_new;
  }

  if (!out.converged && g.lpNorm<Eigen::Infinity>() <= grad_tol)
    out.converged = true;
  out.f = f;
  out.grad = g;
  return out;
}

void check_spec(const ModelSpec& spec) {
  if (spec.quad_nodes < 4 || spec.quad_nodes > 100)
    throw std::invalid_argument("quad_nodes must be in [4, 100]");
  if (spec.upper_limit && !(spec.lower_limit < *spec.upper_limit))
    throw std::invalid_argument("lower_limit must be < upper_limit");
  if (spec.max_iter < 1) throw std::invalid_argument("max_iter must be >= 1");
  if (spec.seed_starts < 1)
    throw std::invalid_argument("seed_starts must be >= 1");
}

void check_design_spec(const DesignMatrix& design, const ModelSpec& spec) {
  check_spec(spec);
  if (design.measure != spec.measure)
    throw std::invalid_argument("design and spec disagree on the measure");
  if (design.split != spec.split)
    throw std::invalid_argument("design and spec disagree on the LNW/ANW split");
}

Eigen::VectorXd ols_on_uncensored(const Evaluator& ev, const DesignMatrix& design,
                                  const ModelSpec& spec, double* sigma_out) {
  const int K = static_cast<int>(design.n_columns()) + 1;
  std::vector<int> keep;
  for (int r = 0; r < static_cast<int>(design.rows.size()); ++r) {
    const double yv = design.rows[static_cast<std::size_t>(r)].y;
    const bool left = yv <= spec.lower_limit;
    const bool right = spec.upper_limit && yv >= *spec.upper_limit;
    if (!left && !right) keep.push_back(r);
  }
  (void)ev;
  if (keep.empty()) throw DataError("fit: no uncensored observations");

  Eigen::MatrixXd X(static_cast<int>(keep.size()), K);
  Eigen::VectorXd y(static_cast<int>(keep.size()));
  for (int i = 0; i < static_cast<int>(keep.size()); ++i) {
    const DesignRow& row = design.rows[static_cast<std::size_t>(keep[static_cast<std::size_t>(i)])];
    X(i, 0) = 1.0;
    for (int k = 1; k < K; ++k) X(i, k) = row.x[static_cast<std::size_t>(k - 1)];
    y(i) = row.y;
  }

  // Ridge-stabilized normal equations; the warm start only needs to be
  // in the right basin, not exact.
  Eigen::MatrixXd XtX = X.transpose() * X;
  XtX.diagonal().array() += 1e-8;
  Eigen::VectorXd beta = XtX.ldlt().solve(X.transpose() * y);

  const Eigen::VectorXd resid = y - X * beta;
  double sigma = std::sqrt(resid.squaredNorm() /
                           std::max<int>(1, static_cast<int>(keep.size())));
  const double y_scale = std::max(1e-8, std::sqrt(y.squaredNorm() /
                                                  static_cast<double>(y.size())));
  sigma = std::max(sigma, 1e-6 * y_scale);
  *sigma_out = sigma;
  return beta;
}

}  // namespace

Restriction Restriction::three_group(int rw, int ow, int nw) {
  Restriction r;
  r.n_rw = rw;
  r.n_ow = ow;
  r.n_nw = nw;
  r.split = false;
  if (rw <= 0 || ow <= 0 || nw <= 0)
    throw std::invalid_argument("restriction group sizes must be positive");
  return r;
}

Restriction Restriction::four_group(int rw, int ow, int lnw, int anw) {
  Restriction r;
  r.n_rw = rw;
  r.n_ow = ow;
  r.n_lnw = lnw;
  r.n_anw = anw;
  r.n_nw = lnw + anw;
  r.split = true;
  if (rw <= 0 || ow <= 0 || lnw <= 0 || anw <= 0)
    throw std::invalid_argument("restriction group sizes must be positive");
  return r;
}

Restriction Restriction::from_groups(const GroupCounts& g, bool split) {
  return split ? four_group(g.n_rw, g.n_ow, g.n_lnw, g.n_anw)
               : three_group(g.n_rw, g.n_ow, g.n_nw());
}

double Restriction::residual(std::span<const double> beta) const {
  const double b1 = beta[static_cast<std::size_t>(idx_nirw())];
  const double b_ow = beta[static_cast<std::size_t>(idx_nirw_x_ow())];
  if (!split) {
    const double b_nw = beta[static_cast<std::size_t>(idx_nirw_x_nw())];
    return n_rw * b1 + n_ow * (b1 + b_ow) + n_nw * (b1 + b_nw);
  }
  const double b_lnw = beta[static_cast<std::size_t>(idx_nirw_x_lnw())];
  const double b_anw = beta[static_cast<std::size_t>(idx_nirw_x_anw())];
  return n_rw * b1 + n_ow * (b1 + b_ow) + n_lnw * (b1 + b_lnw) +
         n_anw * (b1 + b_anw);
}

std::vector<double> expand_restricted(std::span<const double> theta_free,
                                      const Restriction& restriction) {
  if (restriction.n_ow <= 0)
    throw std::invalid_argument("expand_restricted: n_ow must be positive");
  const int elim = restriction.idx_nirw_x_ow();
  if (static_cast<int>(theta_free.size()) < elim + (restriction.split ? 2 : 1))
    throw std::invalid_argument("expand_restricted: reduced vector too short");

  std::vector<double> full(theta_free.size() + 1);
  for (int k = 0; k < elim; ++k) full[static_cast<std::size_t>(k)] = theta_free[static_cast<std::size_t>(k)];
  for (std::size_t k = static_cast<std::size_t>(elim); k < theta_free.size(); ++k)
    full[k + 1] = theta_free[k];

  const double b1 = full[static_cast<std::size_t>(restriction.idx_nirw())];
  double tied;
  if (!restriction.split) {
    const double b_nw = full[static_cast<std::size_t>(restriction.idx_nirw_x_nw())];
    tied = -(restriction.total() * b1 + restriction.n_nw * b_nw) /
           restriction.n_ow;
  } else {
    const double b_lnw = full[static_cast<std::size_t>(restriction.idx_nirw_x_lnw())];
    const double b_anw = full[static_cast<std::size_t>(restriction.idx_nirw_x_anw())];
    tied = -(restriction.total() * b1 + restriction.n_lnw * b_lnw +
             restriction.n_anw * b_anw) /
           restriction.n_ow;
  }
  full[static_cast<std::size_t>(elim)] = tied;
  return full;
}

double loglik(std::span<const double> theta, const DesignMatrix& design,
              const ModelSpec& spec) {
  check_design_spec(design, spec);
  Evaluator ev(design, spec);
  int bad = -1;
  const double v = ev.value(theta, &bad);
  if (!std::isfinite(v))
    throw NumericError("loglik: non-finite contribution for country " +
                       (bad >= 0 ? ev.country_id(bad) : std::string("?")));
  return v;
}

double loglik_with_gradient(std::span<const double> theta,
                            const DesignMatrix& design, const ModelSpec& spec,
                            std::vector<double>& grad) {
  check_design_spec(design, spec);
  Evaluator ev(design, spec);
  int bad = -1;
  const double v = ev.value_gradient(theta, grad, &bad);
  if (!std::isfinite(v))
    throw NumericError("loglik: non-finite contribution for country " +
                       (bad >= 0 ? ev.country_id(bad) : std::string("?")));
  return v;
}

namespace {

/// Negated log-likelihood over the internal parameterization.
struct InternalObjective {
  const Evaluator& ev;
  const ParamMap& map;

  double operator()(const Eigen::VectorXd& x, Eigen::VectorXd* g) const {
    const std::vector<double> full = map.to_full(x);
    // Extreme trial points can underflow the sigma exponentials; report
    // them as infeasible so the line search backs off.
    const double sigma_alpha = full[full.size() - 2];
    const double sigma_eps = full[full.size() - 1];
    if (!std::isfinite(sigma_alpha) || !(sigma_eps > 0.0) ||
        !std::isfinite(sigma_eps)) {
      if (g) g->setZero();
      return std::numeric_limits<double>::infinity();
    }
    std::vector<double> g_full;
    double v;
    if (g) {
      v = ev.value_gradient(full, g_full);
    } else {
      v = ev.value(full);
    }
    if (!std::isfinite(v)) {
      if (g) g->setZero();
      return std::numeric_limits<double>::infinity();
    }
    if (g) *g = -map.chain_gradient(g_full, full);
    return -v;
  }
  double operator()(const Eigen::VectorXd& x, Eigen::VectorXd& g) const {
    return (*this)(x, &g);
  }
};

ParamMap make_param_map(const DesignMatrix& design, const ModelSpec& spec) {
  ParamMap map;
  map.K = static_cast<int>(design.n_columns()) + 1;
  map.restricted = spec.restriction_on;
  map.fix_sigma_alpha = spec.fix_sigma_alpha_zero;
  if (map.restricted) {
    map.restriction = Restriction::from_groups(design.groups, design.split);
    if (map.restriction.total() != static_cast<int>(design.n_countries))
      throw DataError("fit: group counts do not sum to the country count");
  }
  return map;
}

/// Central-difference Hessian of the internal log-likelihood. Step size per
/// coordinate: cbrt(machine eps) * max(1, |theta_j|).
Eigen::MatrixXd numeric_hessian(const Evaluator& ev, const ParamMap& map,
                                const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  const double cbrt_eps = std::cbrt(std::numeric_limits<double>::epsilon());
  Eigen::VectorXd h(n);
  for (int j = 0; j < n; ++j) h(j) = cbrt_eps * std::max(1.0, std::abs(x(j)));

  auto f = [&](const Eigen::VectorXd& p) {
    const std::vector<double> full = map.to_full(p);
    return ev.value(full);
  };

  Eigen::MatrixXd H(n, n);
  const double f0 = f(x);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd xp = x, xm = x;
    xp(j) += h(j);
    xm(j) -= h(j);
    H(j, j) = (f(xp) - 2.0 * f0 + f(xm)) / (h(j) * h(j));
  }
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      Eigen::VectorXd xpp = x, xpm = x, xmp = x, xmm = x;
      xpp(j) += h(j); xpp(k) += h(k);
      xpm(j) += h(j); xpm(k) -= h(k);
      xmp(j) -= h(j); xmp(k) += h(k);
      xmm(j) -= h(j); xmm(k) -= h(k);
      const double v =
          (f(xpp) - f(xpm) - f(xmp) + f(xmm)) / (4.0 * h(j) * h(k));
      H(j, k) = v;
      H(k, j) = v;
    }
  }
  return H;
}

struct InternalStdErrors {
  Eigen::MatrixXd cov;        // over the internal parameterization
  std::vector<bool> flagged;  // per internal coordinate
  bool warning = false;
};

InternalStdErrors invert_information(const Eigen::MatrixXd& hessian) {
  const int n = static_cast<int>(hessian.rows());
  Eigen::MatrixXd info = -hessian;  // observed information
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(info);
  const Eigen::VectorXd& lambda = es.eigenvalues();
  const Eigen::MatrixXd& U = es.eigenvectors();

  InternalStdErrors out;
  out.flagged.assign(static_cast<std::size_t>(n), false);
  const double lmax = lambda.cwiseAbs().maxCoeff();
  const double tol = std::max(lmax, 1.0) * 1e-12;

  Eigen::VectorXd inv_lambda(n);
  for (int k = 0; k < n; ++k) {
    if (lambda(k) <= tol) {
      out.warning = true;
      inv_lambda(k) = 0.0;
      for (int j = 0; j < n; ++j)
        if (std::abs(U(j, k)) > 1e-8) out.flagged[static_cast<std::size_t>(j)] = true;
    } else {
      inv_lambda(k) = 1.0 / lambda(k);
    }
  }
  out.cov = U * inv_lambda.asDiagonal() * U.transpose();
  return out;
}

StdErrors standard_errors_impl(const Evaluator& ev, const ParamMap& map,
                               const Eigen::VectorXd& x_internal) {
  const Eigen::MatrixXd H = numeric_hessian(ev, map, x_internal);
  InternalStdErrors internal = invert_information(H);

  const int K = map.K;
  const int nb = map.n_beta_free();
  const Eigen::MatrixXd J = map.beta_jacobian();
  const Eigen::MatrixXd cov_bb = internal.cov.topLeftCorner(nb, nb);
  const Eigen::MatrixXd cov_full = J * cov_bb * J.transpose();

  StdErrors out;
  out.warning = internal.warning;
  out.cov_beta.assign(static_cast<std::size_t>(K),
                      std::vector<double>(static_cast<std::size_t>(K), 0.0));
  for (int a = 0; a < K; ++a)
    for (int b = 0; b < K; ++b)
      out.cov_beta[static_cast<std::size_t>(a)][static_cast<std::size_t>(b)] =
          cov_full(a, b);

  // A full-beta entry is unreliable if any free coordinate it depends on
  // sits in a flat direction of the information matrix.
  out.flagged.assign(static_cast<std::size_t>(K), false);
  for (int k = 0; k < K; ++k)
    for (int j = 0; j < nb; ++j)
      if (J(k, j) != 0.0 && internal.flagged[static_cast<std::size_t>(j)])
        out.flagged[static_cast<std::size_t>(k)] = true;

  out.se_beta.resize(static_cast<std::size_t>(K));
  for (int k = 0; k < K; ++k) {
    const double v = cov_full(k, k);
    out.se_beta[static_cast<std::size_t>(k)] =
        out.flagged[static_cast<std::size_t>(k)]
            ? std::numeric_limits<double>::quiet_NaN()
            : std::sqrt(std::max(0.0, v));
  }

  // Sigma standard errors via d sigma / d log sigma = sigma.
  const std::vector<double> full = map.to_full(x_internal);
  const double sigma_alpha = full[static_cast<std::size_t>(K)];
  const double sigma_eps = full[static_cast<std::size_t>(K) + 1];
  int j = nb;
  if (!map.fix_sigma_alpha) {
    const double var = internal.cov(j, j);
    out.se_sigma_alpha =
        internal.flagged[static_cast<std::size_t>(j)]
            ? std::numeric_limits<double>::quiet_NaN()
            : sigma_alpha * std::sqrt(std::max(0.0, var));
    ++j;
  }
  {
    const double var = internal.cov(j, j);
    out.se_sigma_eps = internal.flagged[static_cast<std::size_t>(j)]
                           ? std::numeric_limits<double>::quiet_NaN()
                           : sigma_eps * std::sqrt(std::max(0.0, var));
  }
  return out;
}

}  // namespace

FitResult fit(const DesignMatrix& design, const ModelSpec& spec) {
  check_design_spec(design, spec);
  Evaluator ev(design, spec);
  ParamMap map = make_param_map(design, spec);

  double sigma_start = 0.0;
  Eigen::VectorXd beta_ols = ols_on_uncensored(ev, design, spec, &sigma_start);
  const double sigma_alpha_start = 0.5 * sigma_start;

  std::vector<double> beta0(beta_ols.data(), beta_ols.data() + beta_ols.size());
  const Eigen::VectorXd x0 =
      map.to_internal(beta0, sigma_alpha_start, sigma_start);

  InternalObjective objective{ev, map};
  auto obj = [&objective](const Eigen::VectorXd& x, Eigen::VectorXd* g) {
    return objective(x, g);
  };

  BfgsOutcome best;
  bool have_best = false;
  std::ostringstream trace;
  for (int s = 0; s < spec.seed_starts; ++s) {
    Eigen::VectorXd x = x0;
    if (s > 0) {
      // Deterministic perturbations of the warm start.
      std::mt19937_64 rng(0x9E3779B97F4A7C15ull ^
                          (0x100000001B3ull * static_cast<std::uint64_t>(s)));
      std::normal_distribution<double> noise(0.0, 1.0);
      for (int j = 0; j < map.n_beta_free(); ++j)
        x(j) += 0.5 * (std::abs(x0(j)) + 0.1) * noise(rng);
      for (int j = map.n_beta_free(); j < map.dim(); ++j)
        x(j) += 0.25 * noise(rng);
    }
    BfgsOutcome run = bfgs_minimize(obj, std::move(x), spec.max_iter, spec.grad_tol);
    trace << (s ? ", " : "") << "start " << s << ": loglik "
          << (std::isfinite(run.f) ? -run.f : kNegInf)
          << (run.converged ? "" : " (not converged)");
    if (run.converged && (!have_best || run.f < best.f)) {
      best = std::move(run);
      have_best = true;
    }
  }
  if (!have_best)
    throw ConvergenceError("fit: no start converged within " +
                           std::to_string(spec.max_iter) +
                           " iterations [" + trace.str() + "]");

  const std::vector<double> full = map.to_full(best.x);
  const int K = map.K;

  FitResult result;
  result.measure = design.measure;
  result.split = design.split;
  result.column_names = design.column_names;
  result.beta.assign(full.begin(), full.begin() + K);
  result.sigma_alpha = full[static_cast<std::size_t>(K)];
  result.sigma_eps = full[static_cast<std::size_t>(K) + 1];
  result.loglik = -best.f;
  result.converged = true;
  result.iterations = best.iterations;
  result.gradient_norm = best.grad.lpNorm<Eigen::Infinity>();
  result.n_censored = ev.n_censored();
  result.n_obs = ev.n_rows();
  result.n_countries = ev.n_countries();
  if (spec.restriction_on) result.restriction = map.restriction;

  StdErrors errors = standard_errors_impl(ev, map, best.x);
  result.se = errors.se_beta;
  result.cov_beta = errors.cov_beta;
  result.se_flagged = errors.flagged;
  result.hessian_warning = errors.warning;
  result.se_sigma_alpha = errors.se_sigma_alpha;
  result.se_sigma_eps = errors.se_sigma_eps;
  return result;
}

StdErrors standard_errors(const FitResult& result, const DesignMatrix& design,
                          const ModelSpec& spec) {
  if (!result.converged)
    throw std::invalid_argument("standard_errors: fit did not converge");
  check_design_spec(design, spec);
  Evaluator ev(design, spec);
  ParamMap map = make_param_map(design, spec);
  const Eigen::VectorXd x =
      map.to_internal(result.beta, result.sigma_alpha, result.sigma_eps);
  return standard_errors_impl(ev, map, x);
}

std::vector<HypothesisResult> hypothesis_test(const FitResult& result) {
  if (!result.converged)
    throw std::invalid_argument("hypothesis_test: fit did not converge");
  if (result.cov_beta.empty())
    throw Error("hypothesis_test: covariance matrix missing from fit result");

  const auto pair_test = [&result](int hi, int lo, const std::string& label) {
    const auto h = static_cast<std::size_t>(hi);
    const auto l = static_cast<std::size_t>(lo);
    HypothesisResult r;
    r.label = label;
    r.delta = result.beta[h] - result.beta[l];
    const double var = result.cov_beta[h][h] + result.cov_beta[l][l] -
                       2.0 * result.cov_beta[h][l];
    r.se_delta = std::sqrt(std::max(0.0, var));
    if (r.se_delta > 0.0) {
      r.one_sided_p = norm_cdf(-r.delta / r.se_delta);
    } else {
      r.one_sided_p = r.delta > 0.0 ? 0.0 : (r.delta < 0.0 ? 1.0 : 0.5);
    }
    return r;
  };

  std::vector<HypothesisResult> tests;
  if (!result.split) {
    tests.push_back(pair_test(5, 4, "NIRW_x_NW - NIRW_x_OW"));
  } else {
    tests.push_back(pair_test(6, 5, "NIRW_x_LNW - NIRW_x_OW"));
    tests.push_back(pair_test(7, 5, "NIRW_x_ANW - NIRW_x_OW"));
  }
  return tests;
}

}  // namespace vinoreg

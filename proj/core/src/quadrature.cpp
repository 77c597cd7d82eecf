#include "vinoreg/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace vinoreg {

QuadratureRule gauss_hermite(int n) {
  if (n < 1 || n > 100)
    throw std::invalid_argument("gauss_hermite: n must be in [1, 100], got " +
                                std::to_string(n));

  const double mu0 = std::sqrt(std::numbers::pi);  // integral of exp(-x^2)

  if (n == 1) return QuadratureRule{{0.0}, {mu0}};

  // Jacobi matrix of the (physicists') Hermite recurrence: zero diagonal,
  // off-diagonal b_k = sqrt(k/2).
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double b = std::sqrt(0.5 * k);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("gauss_hermite: eigensolver failed");

  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = solver.eigenvalues()(i);
    const double first = solver.eigenvectors()(0, i);
    rule.weights[i] = mu0 * first * first;
  }
  return rule;
}

}  // namespace vinoreg

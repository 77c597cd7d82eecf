#pragma once

#include <vector>

namespace vinoreg {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Hermite rule for the weight function exp(-x^2) on (-inf, inf),
/// computed by Golub-Welsch from the Jacobi matrix of the Hermite
/// recurrence. Nodes ascend; weights sum to sqrt(pi).
///
/// Valid for 1 <= n <= 100; throws std::invalid_argument otherwise.
QuadratureRule gauss_hermite(int n);

}  // namespace vinoreg

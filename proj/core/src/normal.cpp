#include "vinoreg/normal.hpp"

#include <cmath>

namespace vinoreg {

double norm_pdf(double z) { return std::exp(-0.5 * z * z - 0.5 * kLogTwoPi); }

double norm_cdf(double z) { return 0.5 * std::erfc(-z / kSqrtTwo); }

double log_norm_pdf(double z) { return -0.5 * z * z - 0.5 * kLogTwoPi; }

double log_norm_cdf(double z) {
  if (z > 6.0) {
    // Phi(z) = 1 - Q, Q tiny; log1p keeps full precision.
    return std::log1p(-0.5 * std::erfc(z / kSqrtTwo));
  }
  if (z > -37.0) {
    return std::log(0.5 * std::erfc(-z / kSqrtTwo));
  }
  // Lower tail: Phi(z) ~ phi(z)/(-z) * (1 - 1/z^2 + 3/z^4 - 15/z^6).
  const double z2 = z * z;
  const double series = 1.0 - 1.0 / z2 + 3.0 / (z2 * z2) - 15.0 / (z2 * z2 * z2);
  return -0.5 * z2 - 0.5 * kLogTwoPi - std::log(-z) + std::log(series);
}

double mills_ratio(double z) {
  return std::exp(log_norm_pdf(z) - log_norm_cdf(z));
}

double two_sided_p(double z) { return std::erfc(std::abs(z) / kSqrtTwo); }

}  // namespace vinoreg

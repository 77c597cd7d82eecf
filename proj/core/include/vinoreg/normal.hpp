#pragma once

// Scalar standard-normal helpers, stable deep into the lower tail.

namespace vinoreg {

inline constexpr double kLogTwoPi = 1.8378770664093454836;
inline constexpr double kSqrtTwo = 1.4142135623730950488;

double norm_pdf(double z);
double norm_cdf(double z);
double log_norm_pdf(double z);

/// log Phi(z); switches to an asymptotic expansion below z = -37 where
/// erfc underflows.
double log_norm_cdf(double z);

/// phi(z) / Phi(z), the inverse Mills ratio.
double mills_ratio(double z);

/// Two-sided p-value of a normal z statistic.
double two_sided_p(double z);

}  // namespace vinoreg

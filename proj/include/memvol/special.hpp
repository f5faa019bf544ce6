#pragma once

namespace memvol {

inline constexpr double kSqrtPi = 1.772453850905516027298167483341145;

/// Error function from W. J. Cody's rational Chebyshev approximations
/// (Math. Comp. 23, 1969). Absolute error stays below 1e-15 in double
/// precision; saturates to ±1 for |x| ≥ 6.
double erf(double x);

/// Complementary error function, same approximation family; no
/// cancellation for large positive x.
double erfc(double x);

/// Standard normal CDF, Φ(x) = erfc(-x/√2)/2.
double normal_cdf(double x);

/// Inverse standard normal CDF for p in (0, 1), Wichura's AS241 (PPND16),
/// relative accuracy about 1e-16.
double normal_quantile(double p);

} // namespace memvol

#ifndef RMSTBART_SPECIAL_HPP
#define RMSTBART_SPECIAL_HPP

namespace rmstbart {

/// Standard normal CDF, absolute error below 1e-12.
double normal_cdf(double x);

/// Upper tail P(Z > x); keeps relative precision far in the right tail.
double normal_cdf_upper(double x);

/// Standard normal quantile (Wichura's AS241 PPND16 rational approximation).
double normal_quantile(double p);

/// Regularized lower incomplete gamma: P(T <= x) for T ~ Gamma(shape, rate).
/// Negative x maps to 0.
double gamma_cdf(double x, double shape, double rate);

}  // namespace rmstbart

#endif

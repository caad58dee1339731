#ifndef RMSTBART_WEIBULL_AFT_HPP
#define RMSTBART_WEIBULL_AFT_HPP

#include <cstddef>
#include <vector>

#include "rmstbart/survival_data.hpp"

namespace rmstbart {

/// Maximum-likelihood Weibull AFT fit for right-censored responses on the
/// log scale: y_i = x_i' beta + sigma * W_i with W standard minimum-Gumbel.
/// `residual_variance` is the implied error variance sigma^2 * pi^2 / 6.
struct WeibullAftFit {
  std::vector<double> beta;  // intercept first
  double log_sigma = 0.0;
  bool converged = false;
  double residual_variance = 0.0;
};

/// Newton fit with step halving. `x` may be null when p = 0 (intercept
/// only). `ridge` adds a quadratic penalty on the non-intercept
/// coefficients of the standardized design.
WeibullAftFit fit_weibull_aft(const std::vector<double>& y, const std::vector<int>& events,
                              const double* x, std::size_t p, double ridge = 0.0);

/// Residual-variance default for the loss tuning parameter: a plain Weibull
/// AFT fit of the truncated outcomes when p <= n/5, a ridge-penalized fit
/// with the penalty chosen by 5-fold likelihood cross-validation otherwise.
/// Falls back to the variance of the uncensored outcomes (with a note on
/// stderr) when the fit fails, and floors the result at 1e-6.
double default_sigma_r2(const TruncatedDataset& trunc, const SurvivalDataset& data);

}  // namespace rmstbart

#endif

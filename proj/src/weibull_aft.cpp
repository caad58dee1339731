#include "rmstbart/weibull_aft.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "rmstbart/errors.hpp"

namespace rmstbart {

namespace {

constexpr double kPiSqOver6 = 1.6449340668482264;

// in-place Cholesky solve of A x = b for a symmetric positive-definite A
// (row-major d x d); returns false when A is not numerically PD
bool cholesky_solve(std::vector<double>& a, std::vector<double>& b, std::size_t d) {
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = a[i * d + j];
      for (std::size_t k = 0; k < j; ++k) sum -= a[i * d + k] * a[j * d + k];
      if (i == j) {
        if (!(sum > 0.0)) return false;
        a[i * d + i] = std::sqrt(sum);
      } else {
        a[i * d + j] = sum / a[j * d + j];
      }
    }
  }
  for (std::size_t i = 0; i < d; ++i) {
    double sum = b[i];
    for (std::size_t k = 0; k < i; ++k) sum -= a[i * d + k] * b[k];
    b[i] = sum / a[i * d + i];
  }
  for (std::size_t ii = d; ii-- > 0;) {
    double sum = b[ii];
    for (std::size_t k = ii + 1; k < d; ++k) sum -= a[k * d + ii] * b[k];
    b[ii] = sum / a[ii * d + ii];
  }
  return true;
}

struct Design {
  std::vector<double> x;  // standardized, row-major n x p
  std::vector<char> keep; // constant columns dropped
  std::vector<double> mean, sd;
  std::size_t n = 0, p = 0;
};

Design standardize(const double* x, std::size_t n, std::size_t p) {
  Design d;
  d.n = n;
  d.p = p;
  d.keep.assign(p, 1);
  d.mean.assign(p, 0.0);
  d.sd.assign(p, 1.0);
  d.x.assign(n * p, 0.0);
  for (std::size_t j = 0; j < p; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += x[i * p + j];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double c = x[i * p + j] - mean;
      ss += c * c;
    }
    const double sd = std::sqrt(ss / static_cast<double>(n));
    d.mean[j] = mean;
    if (!(sd > 0.0)) {
      d.keep[j] = 0;
      continue;
    }
    d.sd[j] = sd;
    for (std::size_t i = 0; i < n; ++i) d.x[i * p + j] = (x[i * p + j] - mean) / sd;
  }
  return d;
}

struct LoglikParts {
  double value = 0.0;
  std::vector<double> grad;
  std::vector<double> neg_hess;  // row-major, (p+2)^2
};

// penalized Weibull AFT log likelihood with analytic derivatives;
// parameters are (beta_0, beta_1..beta_p, log sigma)
LoglikParts weibull_loglik(const std::vector<double>& theta, const std::vector<double>& y,
                           const std::vector<int>& events, const Design& d, double ridge,
                           bool derivatives) {
  const std::size_t p = d.p;
  const std::size_t dim = p + 2;
  const double log_sigma = theta[dim - 1];
  const double sigma = std::exp(log_sigma);
  LoglikParts out;
  if (derivatives) {
    out.grad.assign(dim, 0.0);
    out.neg_hess.assign(dim * dim, 0.0);
  }
  for (std::size_t i = 0; i < d.n; ++i) {
    double lin = theta[0];
    for (std::size_t j = 0; j < p; ++j) lin += theta[j + 1] * d.x[i * p + j];
    double z = (y[i] - lin) / sigma;
    z = std::min(z, 250.0);  // guards exp overflow far from the optimum
    const double ez = std::exp(z);
    if (events[i] == 1) {
      out.value += -log_sigma + z - ez;
    } else {
      out.value += -ez;
    }
    if (!derivatives) continue;
    const double dl_dz = static_cast<double>(events[i]) - ez;
    // gradient: d z / d beta_j = -x_ij / sigma, d z / d log sigma = -z
    out.grad[0] += -dl_dz / sigma;
    for (std::size_t j = 0; j < p; ++j) out.grad[j + 1] += -dl_dz * d.x[i * p + j] / sigma;
    out.grad[dim - 1] += -static_cast<double>(events[i]) - dl_dz * z;
    // negative Hessian blocks from d^2 l / dz^2 = -e^z plus chain terms
    const double s2 = sigma * sigma;
    for (std::size_t j = 0; j <= p; ++j) {
      const double xj = j == 0 ? 1.0 : d.x[i * p + j - 1];
      for (std::size_t k = 0; k <= j; ++k) {
        const double xk = k == 0 ? 1.0 : d.x[i * p + k - 1];
        out.neg_hess[j * dim + k] += ez * xj * xk / s2;
      }
      // cross term with log sigma
      out.neg_hess[(dim - 1) * dim + j] += (ez + ez * z - static_cast<double>(events[i])) * xj / sigma;
    }
    out.neg_hess[(dim - 1) * dim + (dim - 1)] +=
        z * z * ez + z * ez - z * static_cast<double>(events[i]);
  }
  if (ridge > 0.0) {
    for (std::size_t j = 1; j <= p; ++j) {
      out.value -= 0.5 * ridge * theta[j] * theta[j];
      if (derivatives) {
        out.grad[j] -= ridge * theta[j];
        out.neg_hess[j * dim + j] += ridge;
      }
    }
  }
  if (derivatives) {
    for (std::size_t j = 0; j < dim; ++j) {
      for (std::size_t k = j + 1; k < dim; ++k) out.neg_hess[j * dim + k] = out.neg_hess[k * dim + j];
    }
  }
  return out;
}

}  // namespace

WeibullAftFit fit_weibull_aft(const std::vector<double>& y, const std::vector<int>& events,
                              const double* x, std::size_t p, double ridge) {
  const std::size_t n = y.size();
  if (events.size() != n || n < 2) throw config_error("weibull aft: need n >= 2 with event flags");
  std::size_t n_events = 0;
  for (int e : events) n_events += static_cast<std::size_t>(e);
  if (n_events == 0) throw numeric_error("weibull aft: no observed events");

  Design d;
  if (p > 0) {
    d = standardize(x, n, p);
  } else {
    d.n = n;
  }
  const std::size_t dim = d.p + 2;

  double mean_y = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double var_y = 0.0;
  for (double v : y) var_y += (v - mean_y) * (v - mean_y);
  var_y /= static_cast<double>(n);

  std::vector<double> theta(dim, 0.0);
  theta[0] = mean_y;
  theta[dim - 1] = 0.5 * std::log(std::max(var_y, 1e-8));

  LoglikParts cur = weibull_loglik(theta, y, events, d, ridge, true);
  bool converged = false;
  for (int iter = 0; iter < 200; ++iter) {
    double gnorm = 0.0;
    for (double g : cur.grad) gnorm = std::max(gnorm, std::fabs(g));
    if (gnorm < 1e-8 * (1.0 + std::fabs(cur.value))) {
      converged = true;
      break;
    }
    std::vector<double> a = cur.neg_hess;
    std::vector<double> step = cur.grad;
    double jitter = 0.0;
    while (!cholesky_solve(a, step, dim)) {
      jitter = jitter == 0.0 ? 1e-6 : jitter * 10.0;
      if (jitter > 1e6) break;
      a = cur.neg_hess;
      for (std::size_t j = 0; j < dim; ++j) a[j * dim + j] += jitter * (1.0 + std::fabs(cur.neg_hess[j * dim + j]));
      step = cur.grad;
    }
    if (jitter > 1e6) break;
    double scale = 1.0;
    bool improved = false;
    for (int half = 0; half < 40; ++half) {
      std::vector<double> trial = theta;
      for (std::size_t j = 0; j < dim; ++j) trial[j] += scale * step[j];
      trial[dim - 1] = std::clamp(trial[dim - 1], -20.0, 20.0);
      const LoglikParts next = weibull_loglik(trial, y, events, d, ridge, false);
      if (std::isfinite(next.value) && next.value > cur.value - 1e-12) {
        theta = trial;
        cur = weibull_loglik(theta, y, events, d, ridge, true);
        improved = true;
        break;
      }
      scale *= 0.5;
    }
    if (!improved) break;
  }

  WeibullAftFit fit;
  fit.converged = converged;
  fit.log_sigma = theta[dim - 1];
  const double sigma = std::exp(fit.log_sigma);
  fit.residual_variance = sigma * sigma * kPiSqOver6;
  // map coefficients back to the original covariate scale
  fit.beta.assign(p + 1, 0.0);
  fit.beta[0] = theta[0];
  for (std::size_t j = 0; j < d.p; ++j) {
    if (!d.keep[j]) continue;
    fit.beta[j + 1] = theta[j + 1] / d.sd[j];
    fit.beta[0] -= theta[j + 1] * d.mean[j] / d.sd[j];
  }
  return fit;
}

namespace {

double heldout_loglik(const std::vector<double>& y, const std::vector<int>& events,
                      const double* x, std::size_t p, std::size_t folds, double ridge) {
  const std::size_t n = y.size();
  double total = 0.0;
  for (std::size_t f = 0; f < folds; ++f) {
    std::vector<double> ytr, yte;
    std::vector<int> etr, ete;
    std::vector<double> xtr, xte;
    for (std::size_t i = 0; i < n; ++i) {
      const bool test = i % folds == f;
      auto& yv = test ? yte : ytr;
      auto& ev = test ? ete : etr;
      auto& xv = test ? xte : xtr;
      yv.push_back(y[i]);
      ev.push_back(events[i]);
      for (std::size_t j = 0; j < p; ++j) xv.push_back(x[i * p + j]);
    }
    if (std::accumulate(etr.begin(), etr.end(), 0) == 0 ||
        std::accumulate(ete.begin(), ete.end(), 0) == 0) {
      continue;
    }
    WeibullAftFit fit;
    try {
      fit = fit_weibull_aft(ytr, etr, xtr.data(), p, ridge);
    } catch (const std::exception&) {
      continue;
    }
    // score the held-out fold; coefficients are on the original scale
    const double sigma = std::exp(fit.log_sigma);
    for (std::size_t i = 0; i < yte.size(); ++i) {
      double lin = fit.beta[0];
      for (std::size_t j = 0; j < p; ++j) lin += fit.beta[j + 1] * xte[i * p + j];
      double z = std::min((yte[i] - lin) / sigma, 250.0);
      total += ete[i] == 1 ? -fit.log_sigma + z - std::exp(z) : -std::exp(z);
    }
  }
  return total;
}

}  // namespace

double default_sigma_r2(const TruncatedDataset& trunc, const SurvivalDataset& data) {
  const std::size_t n = data.n;
  if (n < 2) throw config_error("default_sigma_r2: need at least two observations");
  const std::vector<double>& y = trunc.y_tau;  // centering shifts only the intercept
  const std::vector<int>& ev = trunc.delta_tau;

  double estimate = -1.0;
  try {
    if (data.p == 0 || static_cast<double>(data.p) <= static_cast<double>(n) / 5.0) {
      const WeibullAftFit fit = fit_weibull_aft(y, ev, data.covariates.data(), data.p);
      if (fit.converged) estimate = fit.residual_variance;
    } else {
      const double lambdas[] = {0.01, 0.1, 1.0, 10.0, 100.0};
      double best_score = -std::numeric_limits<double>::infinity();
      double best_lambda = lambdas[2];
      for (double lam : lambdas) {
        const double score = heldout_loglik(y, ev, data.covariates.data(), data.p, 5, lam);
        if (score > best_score) {
          best_score = score;
          best_lambda = lam;
        }
      }
      const WeibullAftFit fit =
          fit_weibull_aft(y, ev, data.covariates.data(), data.p, best_lambda);
      if (fit.converged) estimate = fit.residual_variance;
    }
  } catch (const std::exception&) {
    estimate = -1.0;
  }

  if (!(estimate > 0.0) || !std::isfinite(estimate)) {
    // fall back to the variance of the uncensored truncated outcomes
    double mean = 0.0;
    std::size_t m = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (ev[i] == 1) {
        mean += y[i];
        ++m;
      }
    }
    if (m == 0) throw numeric_error("default_sigma_r2: no observed events");
    mean /= static_cast<double>(m);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (ev[i] == 1) var += (y[i] - mean) * (y[i] - mean);
    }
    var /= static_cast<double>(m);
    std::fprintf(stderr, "note: Weibull AFT fit did not converge; using uncensored outcome variance %.6g\n", var);
    estimate = var;
  }
  return std::max(estimate, 1e-6);
}

}  // namespace rmstbart

#include "rmstbart/aft_censoring.hpp"

#include <algorithm>
#include <cmath>

#include "rmstbart/errors.hpp"
#include "rmstbart/special.hpp"

namespace rmstbart {

double aft_cumhaz(double log_u, double m, double sigma, double max_cumhaz) {
  const double z = (log_u - m) / sigma;
  const double surv = normal_cdf_upper(z);
  if (surv <= 0.0) return max_cumhaz;
  return std::min(-std::log(surv), max_cumhaz);
}

AftCensoringModel::AftCensoringModel(const SurvivalDataset& data, const CutpointGrid* grid,
                                     const AftCensoringConfig& config, Rng& rng)
    : data_(&data), grid_(grid), config_(config) {
  const std::size_t n = data.n;
  latent_log_c_.resize(n);
  log_u_.resize(n);
  unit_weights_.assign(n, 1.0);

  // follow-up times enter on the log scale; a tiny floor guards zero times
  double min_pos = std::numeric_limits<double>::infinity();
  for (double t : data.times) {
    if (t > 0.0) min_pos = std::min(min_pos, t);
  }
  if (!std::isfinite(min_pos)) throw config_error("censoring model: all follow-up times are zero");
  const double floor = min_pos * 0.5;
  for (std::size_t i = 0; i < n; ++i) {
    log_u_[i] = std::log(std::max(data.times[i], floor));
  }

  // center responses at the mean log follow-up of the observed censorings
  double sum = 0.0;
  std::size_t n_cens = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (data.events[i] == 0) {
      sum += log_u_[i];
      ++n_cens;
    }
  }
  center_ = n_cens > 0 ? sum / static_cast<double>(n_cens) : 0.0;

  // initialize latent responses: observed censoring times enter as-is,
  // event rows start just past their truncation bound
  double var_acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    latent_log_c_[i] = log_u_[i] - center_ + (data.events[i] == 1 ? 0.1 : 0.0);
    var_acc += latent_log_c_[i] * latent_log_c_[i];
  }
  double init_var = n > 1 ? var_acc / static_cast<double>(n) : 1.0;
  init_var = std::max(init_var, 1e-6);
  sigma_c_ = std::sqrt(init_var);
  ig_shape_ = 0.5 * config_.prior_df;
  ig_rate_ = 0.5 * config_.prior_df * init_var;

  // leaf scale from the spread of the observed censoring responses
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    if (data.events[i] == 0) {
      lo = std::min(lo, latent_log_c_[i]);
      hi = std::max(hi, latent_log_c_[i]);
    }
  }
  double range = (std::isfinite(lo) && hi > lo) ? hi - lo : 4.0 * sigma_c_;
  if (!(range > 0.0)) range = 1.0;
  LeafPriorParams leaf_prior;
  leaf_prior.sigma_mu = range / (2.0 * config_.kappa * std::sqrt(static_cast<double>(config_.n_trees)));
  leaf_prior.mu_mu = 0.0;
  leaf_sigma_mu_ = leaf_prior.sigma_mu;

  sampler_ = std::make_unique<ForestSampler>(config_.n_trees, data.covariates.data(), n,
                                             data.p, grid_, config_.tree_prior, leaf_prior);
  gibbs_step(rng);
}

void AftCensoringModel::gibbs_step(Rng& rng) {
  const std::size_t n = data_->n;
  const std::vector<double>& fhat = sampler_->fitted();

  // (a) impute latent log censoring times for event rows: C_i > U_i
  for (std::size_t i = 0; i < n; ++i) {
    if (data_->events[i] == 1) {
      latent_log_c_[i] =
          sample_trunc_normal(fhat[i], sigma_c_, log_u_[i] - center_, rng);
    }
  }

  // (b) backfit the forest; Gaussian likelihood is the weighted loss with
  // unit weights and eta = 1 / (2 sigma^2)
  sampler_->sweep(latent_log_c_, unit_weights_, 1.0 / (2.0 * sigma_c_ * sigma_c_), rng);

  // (c) conjugate inverse-gamma update of the residual variance
  double rss = 0.0;
  const std::vector<double>& fit = sampler_->fitted();
  for (std::size_t i = 0; i < n; ++i) {
    const double r = latent_log_c_[i] - fit[i];
    rss += r * r;
  }
  const double shape = ig_shape_ + 0.5 * static_cast<double>(n);
  const double rate = ig_rate_ + 0.5 * rss;
  const double precision = sample_gamma(shape, rate, rng);
  sigma_c_ = std::sqrt(1.0 / precision);
}

double AftCensoringModel::cumhaz(double u, const double* x_row) const {
  if (!(u > 0.0)) return 0.0;
  return aft_cumhaz(std::log(u), regression_mean(x_row), sigma_c_);
}

}  // namespace rmstbart

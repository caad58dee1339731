#ifndef RMSTBART_AFT_CENSORING_HPP
#define RMSTBART_AFT_CENSORING_HPP

#include <cstddef>
#include <memory>
#include <vector>

#include "rmstbart/forest_mcmc.hpp"
#include "rmstbart/rng.hpp"
#include "rmstbart/survival_data.hpp"
#include "rmstbart/tree.hpp"

namespace rmstbart {

/// Covariate-dependent censoring model: log C_i = m(x_i) + xi_i with a
/// sum-of-trees prior on m and Gaussian residuals xi_i ~ N(0, sigma_c^2),
/// sigma_c^2 carrying a conjugate inverse-gamma prior. Observations with
/// delta_i = 1 have censoring times known only to exceed U_i; their log
/// censoring times are imputed by truncated-normal data augmentation.
struct AftCensoringConfig {
  std::size_t n_trees = 200;
  TreePriorParams tree_prior;
  double kappa = 2.0;   // leaf-scale rule divisor, as in the outcome forest
  double prior_df = 3.0;  // inverse-gamma prior: IG(df/2, df*scale/2)
};

class AftCensoringModel {
 public:
  AftCensoringModel(const SurvivalDataset& data, const CutpointGrid* grid,
                    const AftCensoringConfig& config, Rng& rng);

  /// One Gibbs sweep: impute latent log censoring times, backfit the forest
  /// under the Gaussian likelihood, redraw sigma_c^2.
  void gibbs_step(Rng& rng);

  /// Lambda(u | x) = -log P(xi > log u - m(x)) for the current state.
  double cumhaz(double u, const double* x_row) const;

  double sigma_c() const { return sigma_c_; }
  double regression_mean(const double* x_row) const {
    return sampler_->predict_row(x_row) + center_;
  }
  const std::vector<double>& latent_log_c() const { return latent_log_c_; }
  const Forest& forest() const { return sampler_->forest(); }

  // model constants, exposed for the single-node reduction oracle
  double center() const { return center_; }
  double leaf_sigma_mu() const { return leaf_sigma_mu_; }
  double ig_shape() const { return ig_shape_; }
  double ig_rate() const { return ig_rate_; }

 private:
  const SurvivalDataset* data_;
  const CutpointGrid* grid_;
  AftCensoringConfig config_;
  std::unique_ptr<ForestSampler> sampler_;
  std::vector<double> latent_log_c_;  // response on the log scale, centered by center_
  std::vector<double> log_u_;         // truncation bounds for augmented entries
  std::vector<double> unit_weights_;
  double center_ = 0.0;
  double sigma_c_ = 1.0;
  double leaf_sigma_mu_ = 1.0;
  double ig_shape_ = 1.5;
  double ig_rate_ = 1.0;
};

/// Standalone evaluation of the AFT cumulative hazard given a regression
/// mean and residual scale: -log{1 - Phi((log u - m) / sigma)}, with the
/// value clamped to max_cumhaz when the survival probability underflows.
double aft_cumhaz(double log_u, double m, double sigma, double max_cumhaz = 700.0);

}  // namespace rmstbart

#endif

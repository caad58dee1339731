#ifndef RMSTBART_LEAF_MODEL_HPP
#define RMSTBART_LEAF_MODEL_HPP

#include <cstddef>
#include <vector>

#include "rmstbart/rng.hpp"
#include "rmstbart/tree.hpp"

namespace rmstbart {

/// Partial residuals and loss weights entering one tree update. Weights are
/// delta_tau_i * exp{Lambda(U_i^tau | x_i)}: zero for non-events, >= 1 for
/// events (possibly capped).
struct WeightedResiduals {
  std::vector<double> residuals;
  std::vector<double> weights;
  double eta = 1.0;
};

/// Weighted sums for one leaf: s = sum of weights, t = sum of weight *
/// residual, and the raw count of training rows routed to the leaf.
struct LeafStats {
  double s = 0.0;
  double t = 0.0;
  std::size_t n_rows = 0;
};

/// Stats for every leaf of `tree`, keyed by the order of tree.leaves().
std::vector<LeafStats> leaf_sufficient_stats(const DecisionTree& tree,
                                             const CutpointGrid& grid,
                                             const double* x, std::size_t n,
                                             std::size_t p,
                                             const WeightedResiduals& wr);

/// Log of the leaf-marginalized likelihood contribution of one leaf, up to
/// the additive constant -eta * sum w R^2 shared by all structures:
///   0.5 * log(sigma_mu^-2 / a) + ell^2 / (2 a) - mu_mu^2 / (2 sigma_mu^2),
/// with a = 2 eta s + sigma_mu^-2 and ell = 2 eta t + mu_mu / sigma_mu^2.
double integrated_log_likelihood_leaf(const LeafStats& stats, double eta,
                                      const LeafPriorParams& prior);

/// Sum of per-leaf contributions over the whole tree.
double integrated_log_likelihood(const std::vector<LeafStats>& stats, double eta,
                                 const LeafPriorParams& prior);

/// Conjugate Gaussian draw for one leaf: mean ell/a, variance 1/a.
double sample_leaf_param(const LeafStats& stats, double eta,
                         const LeafPriorParams& prior, Rng& rng);

std::vector<double> sample_leaf_params(const std::vector<LeafStats>& stats,
                                       double eta, const LeafPriorParams& prior,
                                       Rng& rng);

}  // namespace rmstbart

#endif

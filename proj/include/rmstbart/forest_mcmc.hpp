#ifndef RMSTBART_FOREST_MCMC_HPP
#define RMSTBART_FOREST_MCMC_HPP

#include <cstdint>
#include <vector>

#include "rmstbart/leaf_model.hpp"
#include "rmstbart/moves.hpp"
#include "rmstbart/rng.hpp"
#include "rmstbart/tree.hpp"

namespace rmstbart {

struct MoveCounts {
  std::uint64_t grow_proposed = 0, grow_accepted = 0;
  std::uint64_t prune_proposed = 0, prune_accepted = 0;
  std::uint64_t change_proposed = 0, change_accepted = 0;
};

/// Bayesian backfitting sampler for a sum of trees under the weighted
/// squared-error pseudo-likelihood exp{-eta sum_i w_i (y_i - f(x_i))^2}.
///
/// One sweep cycles through the trees: each tree sees the partial residuals
/// of the others, takes one grow/prune/change Metropolis-Hastings step on
/// the leaf-marginalized likelihood, and redraws its leaf values from the
/// conjugate Gaussian conditional. Proposals that would route zero training
/// rows into a leaf are rejected. A sweep is sequential by construction;
/// concurrency belongs at the chain/fold/replication level.
class ForestSampler {
 public:
  ForestSampler(std::size_t n_trees, const double* x, std::size_t n, std::size_t p,
                const CutpointGrid* grid, TreePriorParams tree_prior,
                LeafPriorParams leaf_prior);

  void sweep(const std::vector<double>& y, const std::vector<double>& weights,
             double eta, Rng& rng);

  const std::vector<double>& fitted() const { return fhat_; }
  const Forest& forest() const { return forest_; }
  const MoveCounts& move_counts() const { return counts_; }

  /// Interior-node split counts per variable for the current forest.
  void count_splits(double* counts) const;

  /// Prediction for a new covariate row (full routing).
  double predict_row(const double* x_row) const { return forest_.predict(x_row, *grid_); }

 private:
  void update_tree(std::size_t h, const std::vector<double>& y,
                   const std::vector<double>& weights, double eta, Rng& rng);
  void rebuild_fitted();

  Forest forest_;
  const double* x_;
  std::size_t n_, p_;
  const CutpointGrid* grid_;
  TreePriorParams tree_prior_;
  LeafPriorParams leaf_prior_;
  std::vector<std::vector<int>> assign_;  // per tree: row -> leaf node id
  std::vector<double> fhat_;
  std::vector<double> resid_;             // workspace, R_ih for the active tree
  std::vector<LeafStats> stats_;          // workspace indexed by node id
  MoveCounts counts_;
  std::uint64_t sweeps_done_ = 0;
};

}  // namespace rmstbart

#endif

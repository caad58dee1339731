#include "rmstbart/forest_mcmc.hpp"

#include <cmath>

#include "rmstbart/errors.hpp"

namespace rmstbart {

ForestSampler::ForestSampler(std::size_t n_trees, const double* x, std::size_t n,
                             std::size_t p, const CutpointGrid* grid,
                             TreePriorParams tree_prior, LeafPriorParams leaf_prior)
    : x_(x),
      n_(n),
      p_(p),
      grid_(grid),
      tree_prior_(tree_prior),
      leaf_prior_(leaf_prior) {
  if (n_trees == 0) throw config_error("forest needs at least one tree");
  forest_.trees.resize(n_trees);
  assign_.assign(n_trees, std::vector<int>(n_, 0));
  fhat_.assign(n_, 0.0);
  resid_.assign(n_, 0.0);
}

void ForestSampler::rebuild_fitted() {
  std::fill(fhat_.begin(), fhat_.end(), 0.0);
  for (std::size_t h = 0; h < forest_.trees.size(); ++h) {
    const DecisionTree& tree = forest_.trees[h];
    const std::vector<int>& assign = assign_[h];
    for (std::size_t i = 0; i < n_; ++i) fhat_[i] += tree.node(assign[i]).leaf_value;
  }
}

void ForestSampler::sweep(const std::vector<double>& y,
                          const std::vector<double>& weights, double eta, Rng& rng) {
  if (y.size() != n_ || weights.size() != n_) {
    throw config_error("sweep: response/weight lengths differ from design rows");
  }
  if (!(eta > 0.0)) throw config_error("sweep: eta must be positive");
  // periodic recompute keeps incremental fhat updates from drifting
  if (sweeps_done_ % 512 == 0 && sweeps_done_ > 0) rebuild_fitted();
  ++sweeps_done_;
  for (std::size_t h = 0; h < forest_.trees.size(); ++h) {
    update_tree(h, y, weights, eta, rng);
  }
}

void ForestSampler::update_tree(std::size_t h, const std::vector<double>& y,
                                const std::vector<double>& weights, double eta,
                                Rng& rng) {
  DecisionTree& tree = forest_.trees[h];
  std::vector<int>& assign = assign_[h];

  // partial residuals against all other trees, plus current-leaf stats
  if (stats_.size() < tree.storage_size() + 2) stats_.resize(tree.storage_size() + 2);
  for (int id : tree.leaves()) stats_[static_cast<std::size_t>(id)] = LeafStats();
  for (std::size_t i = 0; i < n_; ++i) {
    const double g = tree.node(assign[i]).leaf_value;
    const double r = y[i] - fhat_[i] + g;
    resid_[i] = r;
    LeafStats& st = stats_[static_cast<std::size_t>(assign[i])];
    st.n_rows++;
    const double w = weights[i];
    if (w != 0.0) {
      st.s += w;
      st.t += w * r;
    }
  }

  MoveProposal prop = propose_move(tree, tree_prior_, *grid_, rng);

  if (prop.kind == MoveKind::grow) {
    counts_.grow_proposed++;
    const TreeNode& gn = prop.tree.node(prop.node);
    const double cval = grid_->cut_value(static_cast<std::size_t>(gn.var),
                                         static_cast<std::size_t>(gn.cut));
    LeafStats sl, sr;
    for (std::size_t i = 0; i < n_; ++i) {
      if (assign[i] != prop.node) continue;
      LeafStats& st = x_[i * p_ + gn.var] <= cval ? sl : sr;
      st.n_rows++;
      const double w = weights[i];
      if (w != 0.0) {
        st.s += w;
        st.t += w * resid_[i];
      }
    }
    if (sl.n_rows > 0 && sr.n_rows > 0) {  // empty leaves are rejected outright
      const double d_ill = integrated_log_likelihood_leaf(sl, eta, leaf_prior_) +
                           integrated_log_likelihood_leaf(sr, eta, leaf_prior_) -
                           integrated_log_likelihood_leaf(
                               stats_[static_cast<std::size_t>(prop.node)], eta, leaf_prior_);
      const double d_prior = grow_log_prior_delta(tree.node(prop.node).depth,
                                                  static_cast<std::size_t>(gn.var),
                                                  tree_prior_, *grid_);
      if (std::log(rng.uniform_pos()) < d_prior + d_ill + prop.log_ratio) {
        counts_.grow_accepted++;
        for (std::size_t i = 0; i < n_; ++i) {
          if (assign[i] == prop.node) {
            assign[i] = x_[i * p_ + gn.var] <= cval ? prop.left : prop.right;
          }
        }
        tree = std::move(prop.tree);
        if (stats_.size() < tree.storage_size()) stats_.resize(tree.storage_size());
        stats_[static_cast<std::size_t>(prop.left)] = sl;
        stats_[static_cast<std::size_t>(prop.right)] = sr;
      }
    }
  } else if (prop.kind == MoveKind::prune) {
    counts_.prune_proposed++;
    const int l = tree.node(prop.node).left;
    const int r = tree.node(prop.node).right;
    LeafStats merged;
    merged.n_rows = stats_[static_cast<std::size_t>(l)].n_rows +
                    stats_[static_cast<std::size_t>(r)].n_rows;
    merged.s = stats_[static_cast<std::size_t>(l)].s + stats_[static_cast<std::size_t>(r)].s;
    merged.t = stats_[static_cast<std::size_t>(l)].t + stats_[static_cast<std::size_t>(r)].t;
    const double d_ill =
        integrated_log_likelihood_leaf(merged, eta, leaf_prior_) -
        integrated_log_likelihood_leaf(stats_[static_cast<std::size_t>(l)], eta, leaf_prior_) -
        integrated_log_likelihood_leaf(stats_[static_cast<std::size_t>(r)], eta, leaf_prior_);
    const double d_prior = -grow_log_prior_delta(tree.node(prop.node).depth,
                                                 static_cast<std::size_t>(prop.old_var),
                                                 tree_prior_, *grid_);
    if (std::log(rng.uniform_pos()) < d_prior + d_ill + prop.log_ratio) {
      counts_.prune_accepted++;
      for (std::size_t i = 0; i < n_; ++i) {
        if (assign[i] == l || assign[i] == r) assign[i] = prop.node;
      }
      tree = std::move(prop.tree);
      stats_[static_cast<std::size_t>(prop.node)] = merged;
    }
  } else if (prop.kind == MoveKind::change) {
    counts_.change_proposed++;
    const std::vector<int> leaves = tree.subtree_leaves(prop.node);
    std::vector<LeafStats> fresh(leaves.size());
    std::vector<int> where(tree.storage_size(), -1);
    for (std::size_t k = 0; k < leaves.size(); ++k) where[static_cast<std::size_t>(leaves[k])] = static_cast<int>(k);
    bool empty_leaf = false;
    for (std::size_t i = 0; i < n_; ++i) {
      if (where[static_cast<std::size_t>(assign[i])] < 0) continue;
      const int nid = prop.tree.assign_from(prop.node, x_ + i * p_, *grid_);
      LeafStats& st = fresh[static_cast<std::size_t>(where[static_cast<std::size_t>(nid)])];
      st.n_rows++;
      const double w = weights[i];
      if (w != 0.0) {
        st.s += w;
        st.t += w * resid_[i];
      }
    }
    double d_ill = 0.0;
    for (std::size_t k = 0; k < leaves.size(); ++k) {
      if (fresh[k].n_rows == 0) {
        empty_leaf = true;
        break;
      }
      d_ill += integrated_log_likelihood_leaf(fresh[k], eta, leaf_prior_) -
               integrated_log_likelihood_leaf(stats_[static_cast<std::size_t>(leaves[k])],
                                              eta, leaf_prior_);
    }
    const TreeNode& cn = prop.tree.node(prop.node);
    const double d_prior =
        std::log(static_cast<double>(grid_->n_cuts(static_cast<std::size_t>(prop.old_var)))) -
        std::log(static_cast<double>(grid_->n_cuts(static_cast<std::size_t>(cn.var))));
    if (!empty_leaf &&
        std::log(rng.uniform_pos()) < d_prior + d_ill + prop.log_ratio) {
      counts_.change_accepted++;
      for (std::size_t i = 0; i < n_; ++i) {
        if (where[static_cast<std::size_t>(assign[i])] >= 0) {
          assign[i] = prop.tree.assign_from(prop.node, x_ + i * p_, *grid_);
        }
      }
      tree = std::move(prop.tree);
      for (std::size_t k = 0; k < leaves.size(); ++k) {
        stats_[static_cast<std::size_t>(leaves[k])] = fresh[k];
      }
    }
  }

  // conjugate leaf redraw, then restore fhat = (y - R) + g_new
  for (int id : tree.leaves()) {
    tree.set_leaf_value(id, sample_leaf_param(stats_[static_cast<std::size_t>(id)], eta,
                                              leaf_prior_, rng));
  }
  for (std::size_t i = 0; i < n_; ++i) {
    fhat_[i] = (y[i] - resid_[i]) + tree.node(assign[i]).leaf_value;
  }
}

void ForestSampler::count_splits(double* counts) const {
  for (const auto& tree : forest_.trees) tree.count_splits(p_, counts);
}

}  // namespace rmstbart

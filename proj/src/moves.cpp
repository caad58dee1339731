#include "rmstbart/moves.hpp"

#include <cmath>

#include "rmstbart/errors.hpp"

namespace rmstbart {

namespace {

// uniform draw over variables that own at least one cutpoint
std::size_t draw_splittable_var(const CutpointGrid& grid, Rng& rng) {
  const std::size_t k = grid.n_splittable_vars();
  std::size_t pick = rng.uniform_index(k);
  for (std::size_t j = 0; j < grid.n_vars(); ++j) {
    if (grid.n_cuts(j) == 0) continue;
    if (pick == 0) return j;
    --pick;
  }
  throw numeric_error("draw_splittable_var: no splittable variable");
}

}  // namespace

MoveProbs feasible_move_probs(const DecisionTree& tree, const TreePriorParams& prior,
                              const CutpointGrid& grid) {
  const bool can_grow =
      grid.n_splittable_vars() > 0 && !tree.growable_leaves(prior.max_depth).empty();
  const bool has_interior = tree.n_interior() > 0;
  MoveProbs probs;
  double total = 0.0;
  if (can_grow) {
    probs.grow = prior.p_grow;
    total += prior.p_grow;
  }
  if (has_interior) {
    probs.prune = prior.p_prune;
    probs.change = prior.p_change;
    total += prior.p_prune + prior.p_change;
  }
  if (total > 0.0) {
    probs.grow /= total;
    probs.prune /= total;
    probs.change /= total;
  }
  return probs;
}

double grow_log_prior_delta(int depth, std::size_t var, const TreePriorParams& prior,
                            const CutpointGrid& grid) {
  const double d = static_cast<double>(depth);
  const double split_lp = std::log(prior.alpha_star) - prior.beta_star * std::log1p(d);
  const double term_parent = std::log1p(-prior.alpha_star * std::pow(1.0 + d, -prior.beta_star));
  const double term_child =
      std::log1p(-prior.alpha_star * std::pow(2.0 + d, -prior.beta_star));
  return split_lp - std::log(static_cast<double>(grid.n_splittable_vars())) -
         std::log(static_cast<double>(grid.n_cuts(var))) + 2.0 * term_child - term_parent;
}

MoveProposal propose_move(const DecisionTree& tree, const TreePriorParams& prior,
                          const CutpointGrid& grid, Rng& rng) {
  MoveProposal prop;
  const MoveProbs probs = feasible_move_probs(tree, prior, grid);
  const double total = probs.grow + probs.prune + probs.change;
  if (total <= 0.0) return prop;  // no feasible move

  const double u = rng.uniform();
  if (u < probs.grow) {
    prop.kind = MoveKind::grow;
  } else if (u < probs.grow + probs.prune) {
    prop.kind = MoveKind::prune;
  } else {
    prop.kind = MoveKind::change;
  }

  const double p_avail = static_cast<double>(grid.n_splittable_vars());
  prop.tree = tree;

  if (prop.kind == MoveKind::grow) {
    const std::vector<int> growable = tree.growable_leaves(prior.max_depth);
    const int leaf = growable[rng.uniform_index(growable.size())];
    const std::size_t var = draw_splittable_var(grid, rng);
    const std::size_t cut = rng.uniform_index(grid.n_cuts(var));
    const auto [l, r] = prop.tree.grow(leaf, static_cast<int>(var), static_cast<int>(cut));
    prop.node = leaf;
    prop.left = l;
    prop.right = r;
    const double log_q_fwd = std::log(probs.grow) -
                             std::log(static_cast<double>(growable.size())) -
                             std::log(p_avail) -
                             std::log(static_cast<double>(grid.n_cuts(var)));
    const MoveProbs rev = feasible_move_probs(prop.tree, prior, grid);
    const double log_q_rev =
        std::log(rev.prune) - std::log(static_cast<double>(prop.tree.nog_nodes().size()));
    prop.log_ratio = log_q_rev - log_q_fwd;
    return prop;
  }

  if (prop.kind == MoveKind::prune) {
    const std::vector<int> nogs = tree.nog_nodes();
    const int node = nogs[rng.uniform_index(nogs.size())];
    prop.node = node;
    prop.old_var = tree.node(node).var;
    prop.old_cut = tree.node(node).cut;
    prop.tree.prune(node);
    const double log_q_fwd =
        std::log(probs.prune) - std::log(static_cast<double>(nogs.size()));
    const MoveProbs rev = feasible_move_probs(prop.tree, prior, grid);
    const double log_q_rev =
        std::log(rev.grow) -
        std::log(static_cast<double>(prop.tree.growable_leaves(prior.max_depth).size())) -
        std::log(p_avail) -
        std::log(static_cast<double>(grid.n_cuts(static_cast<std::size_t>(prop.old_var))));
    prop.log_ratio = log_q_rev - log_q_fwd;
    return prop;
  }

  // change
  const std::vector<int> interior = tree.interior_nodes();
  const int node = interior[rng.uniform_index(interior.size())];
  prop.node = node;
  prop.old_var = tree.node(node).var;
  prop.old_cut = tree.node(node).cut;
  const std::size_t var = draw_splittable_var(grid, rng);
  const std::size_t cut = rng.uniform_index(grid.n_cuts(var));
  prop.tree.change(node, static_cast<int>(var), static_cast<int>(cut));
  prop.log_ratio = std::log(static_cast<double>(grid.n_cuts(var))) -
                   std::log(static_cast<double>(grid.n_cuts(static_cast<std::size_t>(prop.old_var))));
  return prop;
}

}  // namespace rmstbart

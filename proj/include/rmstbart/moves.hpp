#ifndef RMSTBART_MOVES_HPP
#define RMSTBART_MOVES_HPP

#include "rmstbart/rng.hpp"
#include "rmstbart/tree.hpp"

namespace rmstbart {

enum class MoveKind { grow, prune, change, none };

/// A structure proposal together with the Hastings correction
/// log q(T | T') - log q(T' | T). Node ids are shared with the source tree;
/// grow introduces two fresh child ids.
struct MoveProposal {
  MoveKind kind = MoveKind::none;
  DecisionTree tree;
  double log_ratio = 0.0;
  int node = -1;      // grown leaf / pruned nog / changed interior
  int left = -1;      // children created by grow
  int right = -1;
  int old_var = -1;   // split rule replaced by change, collapsed by prune
  int old_cut = -1;
};

/// Move mixture renormalized over the moves feasible in the current state:
/// grow needs a leaf below the depth cap and a splittable variable, prune
/// and change need an interior node.
struct MoveProbs {
  double grow = 0.0;
  double prune = 0.0;
  double change = 0.0;
};

MoveProbs feasible_move_probs(const DecisionTree& tree, const TreePriorParams& prior,
                              const CutpointGrid& grid);

/// Draws a grow/prune/change proposal. Grow picks a uniform growable leaf
/// and a uniform (variable, cutpoint); prune picks a uniform no-grandchild
/// interior node; change re-draws the rule at a uniform interior node.
/// Returns kind none when no move is feasible (e.g. depth cap zero).
MoveProposal propose_move(const DecisionTree& tree, const TreePriorParams& prior,
                          const CutpointGrid& grid, Rng& rng);

/// Change in log_tree_prior from growing a depth-d leaf on variable v
/// (split factor, two new terminal factors, uniform rule probabilities).
double grow_log_prior_delta(int depth, std::size_t var, const TreePriorParams& prior,
                            const CutpointGrid& grid);

}  // namespace rmstbart

#endif

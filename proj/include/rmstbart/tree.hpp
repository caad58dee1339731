#ifndef RMSTBART_TREE_HPP
#define RMSTBART_TREE_HPP

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace rmstbart {

/// Candidate split values per variable: quantile-based midpoints of the
/// observed values, strictly increasing and interior to the observed range.
/// A binary variable gets its single midpoint.
struct CutpointGrid {
  std::vector<std::vector<double>> values;

  std::size_t n_vars() const { return values.size(); }
  std::size_t n_cuts(std::size_t var) const { return values[var].size(); }
  double cut_value(std::size_t var, std::size_t cut) const { return values[var][cut]; }
  /// Variables owning at least one cutpoint (constant columns own none).
  std::size_t n_splittable_vars() const {
    std::size_t k = 0;
    for (const auto& v : values) {
      if (!v.empty()) ++k;
    }
    return k;
  }

  static CutpointGrid from_data(const double* x, std::size_t n, std::size_t p,
                                std::size_t grid_size = 100);
};

struct TreeNode {
  int var = -1;   // split variable; -1 marks a leaf
  int cut = -1;   // index into the grid of `var`
  int left = -1;
  int right = -1;
  int parent = -1;
  int depth = 0;
  double leaf_value = 0.0;

  bool is_leaf() const { return var < 0; }
};

/// Binary decision tree with index-based node storage. Nodes freed by prune
/// are recycled; node ids stay stable while a node is alive.
class DecisionTree {
 public:
  DecisionTree();

  const TreeNode& node(int id) const { return nodes_[static_cast<std::size_t>(id)]; }
  int root() const { return 0; }
  /// Upper bound on live node ids (for id-indexed workspaces).
  std::size_t storage_size() const { return nodes_.size(); }

  /// Deterministic routing: descend left iff x[var] <= cut value.
  int assign_leaf(const double* x, const CutpointGrid& grid) const;
  /// Routing restricted to the subtree rooted at `start`.
  int assign_from(int start, const double* x, const CutpointGrid& grid) const;

  double predict(const double* x, const CutpointGrid& grid) const {
    return nodes_[static_cast<std::size_t>(assign_leaf(x, grid))].leaf_value;
  }

  std::vector<int> leaves() const;
  std::vector<int> interior_nodes() const;
  /// Interior nodes whose children are both leaves (prune candidates).
  std::vector<int> nog_nodes() const;
  /// Leaves eligible for a grow move under the depth cap.
  std::vector<int> growable_leaves(int max_depth) const;
  /// Leaf ids of the subtree rooted at `id`.
  std::vector<int> subtree_leaves(int id) const;

  std::size_t n_leaves() const;
  std::size_t n_interior() const;

  /// Splits the leaf `id` on (var, cut); returns {left, right} child ids.
  std::pair<int, int> grow(int id, int var, int cut);
  /// Collapses the no-grandchild interior node `id` back to a leaf.
  void prune(int id);
  /// Replaces the split rule at interior node `id`.
  void change(int id, int var, int cut);

  void set_leaf_value(int id, double v) { nodes_[static_cast<std::size_t>(id)].leaf_value = v; }

  /// Number of interior nodes splitting on each of p variables.
  void count_splits(std::size_t p, double* counts) const;

  /// Canonical structural key (split variables and cutpoints, no leaf
  /// values); equal keys identify equal tree structures.
  std::string structure_key() const;

 private:
  std::vector<TreeNode> nodes_;
  std::vector<int> free_;

  int alloc_node();
  void collect(int id, bool leaves_only, std::vector<int>& out) const;
};

/// Sum-of-trees ensemble: prediction is the sum of each tree's leaf value.
struct Forest {
  std::vector<DecisionTree> trees;

  double predict(const double* x, const CutpointGrid& grid) const {
    double s = 0.0;
    for (const auto& t : trees) s += t.predict(x, grid);
    return s;
  }
};

/// Node-generation prior and move mixture for the structure sampler.
struct TreePriorParams {
  double alpha_star = 0.95;  // split probability scale
  double beta_star = 2.0;    // depth penalty exponent
  double p_grow = 0.3;
  double p_prune = 0.3;
  double p_change = 0.4;
  int max_depth = 64;  // safety bound, never binding in practice
};

struct LeafPriorParams {
  double sigma_mu = 1.0;
  double mu_mu = 0.0;
};

/// Log prior of a tree structure: split/terminate factors alpha*(1+d)^-beta
/// at each node plus uniform variable and cutpoint selection at each split.
double log_tree_prior(const DecisionTree& tree, const TreePriorParams& prior,
                      const CutpointGrid& grid);

}  // namespace rmstbart

#endif

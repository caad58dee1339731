#include "rmstbart/tree.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rmstbart/errors.hpp"

namespace rmstbart {

CutpointGrid CutpointGrid::from_data(const double* x, std::size_t n, std::size_t p,
                                     std::size_t grid_size) {
  if (grid_size == 0) throw config_error("cutpoint grid size must be positive");
  CutpointGrid grid;
  grid.values.resize(p);
  std::vector<double> col(n);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = x[i * p + j];
    std::sort(col.begin(), col.end());
    col.erase(std::unique(col.begin(), col.end()), col.end());
    const std::size_t m = col.size();
    if (m < 2) continue;  // constant variable: no usable cutpoint
    // midpoints between consecutive distinct values, thinned to evenly
    // spaced ranks when there are more than grid_size of them
    const std::size_t n_mid = m - 1;
    const std::size_t take = std::min(grid_size, n_mid);
    auto& cuts = grid.values[j];
    cuts.reserve(take);
    for (std::size_t k = 0; k < take; ++k) {
      const std::size_t idx = (2 * k + 1) * n_mid / (2 * take);
      const double c = 0.5 * (col[idx] + col[idx + 1]);
      if (cuts.empty() || c > cuts.back()) cuts.push_back(c);
    }
  }
  return grid;
}

DecisionTree::DecisionTree() { nodes_.emplace_back(); }

int DecisionTree::alloc_node() {
  if (!free_.empty()) {
    const int id = free_.back();
    free_.pop_back();
    nodes_[static_cast<std::size_t>(id)] = TreeNode();
    return id;
  }
  nodes_.emplace_back();
  return static_cast<int>(nodes_.size()) - 1;
}

int DecisionTree::assign_leaf(const double* x, const CutpointGrid& grid) const {
  return assign_from(0, x, grid);
}

int DecisionTree::assign_from(int start, const double* x, const CutpointGrid& grid) const {
  int id = start;
  while (!nodes_[static_cast<std::size_t>(id)].is_leaf()) {
    const TreeNode& nd = nodes_[static_cast<std::size_t>(id)];
    const double c = grid.cut_value(static_cast<std::size_t>(nd.var),
                                    static_cast<std::size_t>(nd.cut));
    id = x[nd.var] <= c ? nd.left : nd.right;
  }
  return id;
}

void DecisionTree::collect(int id, bool leaves_only, std::vector<int>& out) const {
  const TreeNode& nd = nodes_[static_cast<std::size_t>(id)];
  if (nd.is_leaf()) {
    if (leaves_only) out.push_back(id);
    return;
  }
  if (!leaves_only) out.push_back(id);
  collect(nd.left, leaves_only, out);
  collect(nd.right, leaves_only, out);
}

std::vector<int> DecisionTree::leaves() const {
  std::vector<int> out;
  collect(0, true, out);
  return out;
}

std::vector<int> DecisionTree::interior_nodes() const {
  std::vector<int> out;
  collect(0, false, out);
  return out;
}

std::vector<int> DecisionTree::nog_nodes() const {
  std::vector<int> out;
  for (int id : interior_nodes()) {
    const TreeNode& nd = nodes_[static_cast<std::size_t>(id)];
    if (nodes_[static_cast<std::size_t>(nd.left)].is_leaf() &&
        nodes_[static_cast<std::size_t>(nd.right)].is_leaf()) {
      out.push_back(id);
    }
  }
  return out;
}

std::vector<int> DecisionTree::growable_leaves(int max_depth) const {
  std::vector<int> out;
  for (int id : leaves()) {
    if (nodes_[static_cast<std::size_t>(id)].depth < max_depth) out.push_back(id);
  }
  return out;
}

std::vector<int> DecisionTree::subtree_leaves(int id) const {
  std::vector<int> out;
  collect(id, true, out);
  return out;
}

std::size_t DecisionTree::n_leaves() const { return leaves().size(); }

std::size_t DecisionTree::n_interior() const { return interior_nodes().size(); }

std::pair<int, int> DecisionTree::grow(int id, int var, int cut) {
  TreeNode& nd = nodes_[static_cast<std::size_t>(id)];
  if (!nd.is_leaf()) throw config_error("grow: node is not a leaf");
  const int l = alloc_node();
  const int r = alloc_node();
  TreeNode& parent = nodes_[static_cast<std::size_t>(id)];  // alloc may reallocate
  parent.var = var;
  parent.cut = cut;
  parent.left = l;
  parent.right = r;
  nodes_[static_cast<std::size_t>(l)].parent = id;
  nodes_[static_cast<std::size_t>(r)].parent = id;
  nodes_[static_cast<std::size_t>(l)].depth = parent.depth + 1;
  nodes_[static_cast<std::size_t>(r)].depth = parent.depth + 1;
  return {l, r};
}

void DecisionTree::prune(int id) {
  TreeNode& nd = nodes_[static_cast<std::size_t>(id)];
  if (nd.is_leaf()) throw config_error("prune: node is a leaf");
  if (!nodes_[static_cast<std::size_t>(nd.left)].is_leaf() ||
      !nodes_[static_cast<std::size_t>(nd.right)].is_leaf()) {
    throw config_error("prune: children are not both leaves");
  }
  free_.push_back(nd.left);
  free_.push_back(nd.right);
  nd.var = -1;
  nd.cut = -1;
  nd.left = -1;
  nd.right = -1;
  nd.leaf_value = 0.0;
}

void DecisionTree::change(int id, int var, int cut) {
  TreeNode& nd = nodes_[static_cast<std::size_t>(id)];
  if (nd.is_leaf()) throw config_error("change: node is a leaf");
  nd.var = var;
  nd.cut = cut;
}

void DecisionTree::count_splits(std::size_t p, double* counts) const {
  for (int id : interior_nodes()) {
    const TreeNode& nd = nodes_[static_cast<std::size_t>(id)];
    if (static_cast<std::size_t>(nd.var) < p) counts[nd.var] += 1.0;
  }
}

std::string DecisionTree::structure_key() const {
  std::string out;
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const TreeNode& nd = nodes_[static_cast<std::size_t>(id)];
    if (nd.is_leaf()) {
      out += "L";
    } else {
      out += "(" + std::to_string(nd.var) + ":" + std::to_string(nd.cut) + ")";
      stack.push_back(nd.right);
      stack.push_back(nd.left);
    }
  }
  return out;
}

double log_tree_prior(const DecisionTree& tree, const TreePriorParams& prior,
                      const CutpointGrid& grid) {
  double lp = 0.0;
  const double p_vars = static_cast<double>(grid.n_splittable_vars());
  for (int id : tree.interior_nodes()) {
    const TreeNode& nd = tree.node(id);
    const double d = static_cast<double>(nd.depth);
    lp += std::log(prior.alpha_star) - prior.beta_star * std::log1p(d);
    lp -= std::log(p_vars);
    lp -= std::log(static_cast<double>(grid.n_cuts(static_cast<std::size_t>(nd.var))));
  }
  for (int id : tree.leaves()) {
    const double d = static_cast<double>(tree.node(id).depth);
    lp += std::log1p(-prior.alpha_star * std::pow(1.0 + d, -prior.beta_star));
  }
  return lp;
}

}  // namespace rmstbart

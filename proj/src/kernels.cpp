#include "rmstbart/kernels.hpp"

#include <algorithm>
#include <unordered_map>

#include "rmstbart/errors.hpp"

namespace rmstbart {

void predict_forest_serial(const Forest& forest, const CutpointGrid& grid,
                           const double* x, std::size_t n, std::size_t p, double* out) {
  for (std::size_t i = 0; i < n; ++i) out[i] = forest.predict(x + i * p, grid);
}

void predict_forest_parallel(const Forest& forest, const CutpointGrid& grid,
                             const double* x, std::size_t n, std::size_t p, double* out) {
  const std::ptrdiff_t sn = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < sn; ++i) {
    out[i] = forest.predict(x + static_cast<std::size_t>(i) * p, grid);
  }
}

void predict_draws_serial(const std::vector<Forest>& draws, const CutpointGrid& grid,
                          const double* x, std::size_t n, std::size_t p, double offset,
                          double* out) {
  for (std::size_t d = 0; d < draws.size(); ++d) {
    double* row = out + d * n;
    predict_forest_serial(draws[d], grid, x, n, p, row);
    for (std::size_t i = 0; i < n; ++i) row[i] += offset;
  }
}

void predict_draws_parallel(const std::vector<Forest>& draws, const CutpointGrid& grid,
                            const double* x, std::size_t n, std::size_t p, double offset,
                            double* out) {
  const std::ptrdiff_t nd = static_cast<std::ptrdiff_t>(draws.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t d = 0; d < nd; ++d) {
    double* row = out + static_cast<std::size_t>(d) * n;
    predict_forest_serial(draws[static_cast<std::size_t>(d)], grid, x, n, p, row);
    for (std::size_t i = 0; i < n; ++i) row[i] += offset;
  }
}

std::vector<LeafStats> leaf_stats_serial(const DecisionTree& tree, const CutpointGrid& grid,
                                         const double* x, std::size_t n, std::size_t p,
                                         const WeightedResiduals& wr) {
  return leaf_sufficient_stats(tree, grid, x, n, p, wr);
}

std::vector<LeafStats> leaf_stats_parallel(const DecisionTree& tree, const CutpointGrid& grid,
                                           const double* x, std::size_t n, std::size_t p,
                                           const WeightedResiduals& wr) {
  if (wr.residuals.size() != n || wr.weights.size() != n) {
    throw config_error("leaf_stats_parallel: input lengths differ");
  }
  const std::vector<int> leaf_ids = tree.leaves();
  std::unordered_map<int, std::size_t> pos;
  pos.reserve(leaf_ids.size());
  for (std::size_t k = 0; k < leaf_ids.size(); ++k) pos[leaf_ids[k]] = k;

  // fixed block decomposition: the block partition does not depend on the
  // thread count, and blocks are combined in index order, so the result is
  // bit-identical to the serial accumulation
  const std::size_t block = 2048;
  const std::size_t n_blocks = (n + block - 1) / block;
  std::vector<std::vector<LeafStats>> partial(n_blocks,
                                              std::vector<LeafStats>(leaf_ids.size()));
  const std::ptrdiff_t nb = static_cast<std::ptrdiff_t>(n_blocks);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t b = 0; b < nb; ++b) {
    const std::size_t lo = static_cast<std::size_t>(b) * block;
    const std::size_t hi = std::min(n, lo + block);
    auto& st_block = partial[static_cast<std::size_t>(b)];
    for (std::size_t i = lo; i < hi; ++i) {
      const int leaf = tree.assign_leaf(x + i * p, grid);
      LeafStats& st = st_block[pos.at(leaf)];
      st.n_rows++;
      const double w = wr.weights[i];
      if (w != 0.0) {
        st.s += w;
        st.t += w * wr.residuals[i];
      }
    }
  }
  std::vector<LeafStats> stats(leaf_ids.size());
  for (std::size_t b = 0; b < n_blocks; ++b) {
    for (std::size_t k = 0; k < stats.size(); ++k) {
      stats[k].n_rows += partial[b][k].n_rows;
      stats[k].s += partial[b][k].s;
      stats[k].t += partial[b][k].t;
    }
  }
  return stats;
}

namespace {

double pdp_point(const std::vector<Forest>& draws, const CutpointGrid& grid,
                 const double* x, std::size_t n, std::size_t p, std::size_t var,
                 double u, double offset, std::vector<double>& row_buf) {
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    std::copy(x + i * p, x + (i + 1) * p, row_buf.begin());
    row_buf[var] = u;
    double mean = 0.0;
    for (const auto& f : draws) mean += f.predict(row_buf.data(), grid);
    total += mean / static_cast<double>(draws.size()) + offset;
  }
  return total / static_cast<double>(n);
}

}  // namespace

std::vector<double> partial_dependence_serial(const std::vector<Forest>& draws,
                                              const CutpointGrid& grid, const double* x,
                                              std::size_t n, std::size_t p, std::size_t var,
                                              const std::vector<double>& u_values,
                                              double offset) {
  std::vector<double> out(u_values.size());
  std::vector<double> row(p);
  for (std::size_t k = 0; k < u_values.size(); ++k) {
    out[k] = pdp_point(draws, grid, x, n, p, var, u_values[k], offset, row);
  }
  return out;
}

std::vector<double> partial_dependence_parallel(const std::vector<Forest>& draws,
                                                const CutpointGrid& grid, const double* x,
                                                std::size_t n, std::size_t p, std::size_t var,
                                                const std::vector<double>& u_values,
                                                double offset) {
  std::vector<double> out(u_values.size());
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(u_values.size());
#pragma omp parallel
  {
    std::vector<double> row(p);
#pragma omp for schedule(static)
    for (std::ptrdiff_t k = 0; k < m; ++k) {
      out[static_cast<std::size_t>(k)] = pdp_point(
          draws, grid, x, n, p, var, u_values[static_cast<std::size_t>(k)], offset, row);
    }
  }
  return out;
}

}  // namespace rmstbart

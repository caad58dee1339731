#ifndef RMSTBART_KERNELS_HPP
#define RMSTBART_KERNELS_HPP

#include <cstddef>
#include <vector>

#include "rmstbart/leaf_model.hpp"
#include "rmstbart/tree.hpp"

namespace rmstbart {

/// Data-parallel prediction and accumulation kernels.
///
/// Every kernel ships in two variants: a plain serial reference and an
/// OpenMP version. The parallel variants partition work by independent
/// output slots (rows, draws, grid points) or by a fixed block decomposition
/// with an ordered combine, so they produce bit-identical results to the
/// serial reference at any thread count. Tests assert exact equality;
/// bench/kernel_bench compares their throughput.

/// out[i] = sum over trees of the leaf value reached by row i.
void predict_forest_serial(const Forest& forest, const CutpointGrid& grid,
                           const double* x, std::size_t n, std::size_t p, double* out);
void predict_forest_parallel(const Forest& forest, const CutpointGrid& grid,
                             const double* x, std::size_t n, std::size_t p, double* out);

/// out is draws x n row-major; each draw's forest predicts every row, with
/// `offset` added (the decentering constant).
void predict_draws_serial(const std::vector<Forest>& draws, const CutpointGrid& grid,
                          const double* x, std::size_t n, std::size_t p, double offset,
                          double* out);
void predict_draws_parallel(const std::vector<Forest>& draws, const CutpointGrid& grid,
                            const double* x, std::size_t n, std::size_t p, double offset,
                            double* out);

/// Leaf-indexed weighted sums for one tree (same contract as
/// leaf_sufficient_stats); the parallel variant accumulates fixed row blocks
/// and combines them in block order.
std::vector<LeafStats> leaf_stats_serial(const DecisionTree& tree, const CutpointGrid& grid,
                                         const double* x, std::size_t n, std::size_t p,
                                         const WeightedResiduals& wr);
std::vector<LeafStats> leaf_stats_parallel(const DecisionTree& tree, const CutpointGrid& grid,
                                           const double* x, std::size_t n, std::size_t p,
                                           const WeightedResiduals& wr);

/// Partial dependence: for each grid value u, the average over data rows of
/// the posterior-mean prediction with variable `var` pinned to u.
std::vector<double> partial_dependence_serial(const std::vector<Forest>& draws,
                                              const CutpointGrid& grid, const double* x,
                                              std::size_t n, std::size_t p, std::size_t var,
                                              const std::vector<double>& u_values,
                                              double offset);
std::vector<double> partial_dependence_parallel(const std::vector<Forest>& draws,
                                                const CutpointGrid& grid, const double* x,
                                                std::size_t n, std::size_t p, std::size_t var,
                                                const std::vector<double>& u_values,
                                                double offset);

}  // namespace rmstbart

#endif

#include "rmstbart/leaf_model.hpp"

#include <cmath>
#include <unordered_map>

#include "rmstbart/errors.hpp"

namespace rmstbart {

std::vector<LeafStats> leaf_sufficient_stats(const DecisionTree& tree,
                                             const CutpointGrid& grid,
                                             const double* x, std::size_t n,
                                             std::size_t p,
                                             const WeightedResiduals& wr) {
  if (wr.residuals.size() != n || wr.weights.size() != n) {
    throw config_error("leaf_sufficient_stats: input lengths differ");
  }
  const std::vector<int> leaf_ids = tree.leaves();
  std::unordered_map<int, std::size_t> pos;
  pos.reserve(leaf_ids.size());
  for (std::size_t k = 0; k < leaf_ids.size(); ++k) pos[leaf_ids[k]] = k;
  std::vector<LeafStats> stats(leaf_ids.size());
  for (std::size_t i = 0; i < n; ++i) {
    const int leaf = tree.assign_leaf(x + i * p, grid);
    LeafStats& st = stats[pos[leaf]];
    st.n_rows++;
    const double w = wr.weights[i];
    if (w != 0.0) {
      st.s += w;
      st.t += w * wr.residuals[i];
    }
  }
  return stats;
}

double integrated_log_likelihood_leaf(const LeafStats& stats, double eta,
                                      const LeafPriorParams& prior) {
  if (!(eta > 0.0) || !(prior.sigma_mu > 0.0)) {
    throw config_error("integrated likelihood requires eta > 0 and sigma_mu > 0");
  }
  const double prec0 = 1.0 / (prior.sigma_mu * prior.sigma_mu);
  const double a = 2.0 * eta * stats.s + prec0;
  const double ell = 2.0 * eta * stats.t + prior.mu_mu * prec0;
  return 0.5 * std::log(prec0 / a) + ell * ell / (2.0 * a) -
         prior.mu_mu * prior.mu_mu * prec0 / 2.0;
}

double integrated_log_likelihood(const std::vector<LeafStats>& stats, double eta,
                                 const LeafPriorParams& prior) {
  double ll = 0.0;
  for (const auto& st : stats) ll += integrated_log_likelihood_leaf(st, eta, prior);
  return ll;
}

double sample_leaf_param(const LeafStats& stats, double eta,
                         const LeafPriorParams& prior, Rng& rng) {
  const double prec0 = 1.0 / (prior.sigma_mu * prior.sigma_mu);
  const double a = 2.0 * eta * stats.s + prec0;
  const double mean = (2.0 * eta * stats.t + prior.mu_mu * prec0) / a;
  return mean + rng.normal() / std::sqrt(a);
}

std::vector<double> sample_leaf_params(const std::vector<LeafStats>& stats,
                                       double eta, const LeafPriorParams& prior,
                                       Rng& rng) {
  std::vector<double> out(stats.size());
  for (std::size_t k = 0; k < stats.size(); ++k) {
    out[k] = sample_leaf_param(stats[k], eta, prior, rng);
  }
  return out;
}

}  // namespace rmstbart

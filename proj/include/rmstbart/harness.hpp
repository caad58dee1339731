#ifndef RMSTBART_HARNESS_HPP
#define RMSTBART_HARNESS_HPP

#include <cstddef>

#include "rmstbart/sampler.hpp"
#include "rmstbart/simulation.hpp"

namespace rmstbart {

/// Scores from fitting one simulated replication and evaluating on its test
/// set. `constant_rmse` is the error of the best constant predictor (the
/// mean of the test truths), the intercept-only reference.
struct ReplicationResult {
  double rmse = 0.0;
  double coverage = 0.0;
  double mean_interval_width = 0.0;
  double censor_fraction = 0.0;
  double constant_rmse = 0.0;
  double eta_used = 0.0;
};

/// Generates replication `rep_index` of the scenario, fits the sampler, and
/// scores the test set at the given interval level. The replication index
/// derives both the data stream and the sampler seed, so two method
/// configurations evaluated at the same (seed, rep_index) see identical
/// data.
ReplicationResult run_replication(const ScenarioConfig& scenario,
                                  const SamplerConfig& sampler_template,
                                  std::size_t rep_index, bool use_cv_eta,
                                  double level = 0.95);

}  // namespace rmstbart

#endif

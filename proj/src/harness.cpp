#include "rmstbart/harness.hpp"

#include <cmath>

namespace rmstbart {

namespace {
constexpr std::uint64_t kRepStreamTag = 0x726570ULL;  // "rep"
}

ReplicationResult run_replication(const ScenarioConfig& scenario,
                                  const SamplerConfig& sampler_template,
                                  std::size_t rep_index, bool use_cv_eta, double level) {
  Rng rep_rng = Rng(scenario.seed, 0).derive(kRepStreamTag, rep_index);
  const ScenarioData data = gen_scenario(scenario, rep_rng);
  const TruncatedDataset trunc =
      apply_truncation(data.train, scenario.tau, TimeTransform::identity);

  SamplerConfig cfg = sampler_template;
  cfg.seed = scenario.seed ^ (0x9e3779b97f4a7c15ULL * (rep_index + 1));
  if (use_cv_eta) {
    EtaSelection selection;
    const EtaSelection chosen = cross_validate_eta(selection, data.train, scenario.tau,
                                                   TimeTransform::identity, cfg);
    cfg.eta = chosen.chosen_eta;
    cfg.sigma_r2 = chosen.chosen_sigma_r2;
  }

  const PosteriorDraws draws =
      run_mcmc(cfg, trunc, data.train, data.test_x.data(), scenario.n_test);
  const std::size_t kept = draws.total_kept();
  const std::vector<IntervalSummary> summary =
      posterior_summary(draws.eval_draws, kept, scenario.n_test, level);

  std::vector<double> pred(scenario.n_test), lower(scenario.n_test), upper(scenario.n_test);
  double width = 0.0;
  for (std::size_t i = 0; i < scenario.n_test; ++i) {
    pred[i] = summary[i].mean;
    lower[i] = summary[i].lower;
    upper[i] = summary[i].upper;
    width += summary[i].upper - summary[i].lower;
  }

  ReplicationResult result;
  result.rmse = rmse_metric(pred, data.test_truth);
  result.coverage = coverage_metric(lower, upper, data.test_truth);
  result.mean_interval_width = width / static_cast<double>(scenario.n_test);
  result.censor_fraction = data.censor_fraction;
  result.eta_used = draws.eta;

  double truth_mean = 0.0;
  for (double t : data.test_truth) truth_mean += t;
  truth_mean /= static_cast<double>(scenario.n_test);
  const std::vector<double> constant(scenario.n_test, truth_mean);
  result.constant_rmse = rmse_metric(constant, data.test_truth);
  return result;
}

}  // namespace rmstbart

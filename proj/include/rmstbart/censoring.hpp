#ifndef RMSTBART_CENSORING_HPP
#define RMSTBART_CENSORING_HPP

#include <cstddef>
#include <vector>

#include "rmstbart/rng.hpp"
#include "rmstbart/survival_data.hpp"

namespace rmstbart {

/// Which censoring model produced a cumulative-hazard draw.
enum class CensoringTag { noninformative, informative, fixed };

/// One posterior draw of the censoring cumulative hazard evaluated at every
/// truncated follow-up time; exp of these values are the IPC weights.
struct CumHazDraw {
  std::vector<double> values;
  CensoringTag tag = CensoringTag::noninformative;
};

/// Time grid and gamma-process hyperparameters for the noninformative model.
struct GammaProcessConfig {
  std::vector<double> grid;               // 0 < s_1 < ... < s_J, covers max u_tau
  double kappa0 = 1.0;                    // rate of the gamma process
  std::vector<double> alpha_increments;   // prior mean increments, default all 1

  double alpha_increment(std::size_t j) const {
    return alpha_increments.empty() ? 1.0 : alpha_increments[j];
  }
  void validate() const;
};

/// Quantile-based default grid: min(max_bins, #distinct u_tau) interval ends
/// with the last grid point at max(u_tau).
GammaProcessConfig default_gamma_process_config(const std::vector<double>& u_tau,
                                                std::size_t max_bins = 50);

/// Interval censoring-event counts E_j and at-risk counts R_j. Censoring
/// events are observations with original delta_i = 0 and U_i below the
/// restriction point.
struct GroupedCensoringData {
  std::vector<long> censor_events;  // E_j
  std::vector<long> at_risk;        // R_j
};

GroupedCensoringData group_censoring(const TruncatedDataset& trunc,
                                     const std::vector<int>& original_events,
                                     const GammaProcessConfig& config);

/// Posterior sampler for the hazard increments lambda_j, independent across
/// intervals with density proportional to
///   lambda^{kappa0 alpha_j - 1} exp{-lambda (R_j - E_j + kappa0)} (1 - e^{-lambda})^{E_j}.
/// With kappa0 = 1 and unit increments the draw is -log of a Beta variable;
/// other hyperparameters use a tabulated inverse CDF built once per interval.
class GammaProcessSampler {
 public:
  GammaProcessSampler(const GroupedCensoringData& grouped, const GammaProcessConfig& config);

  std::vector<double> draw(Rng& rng) const;

 private:
  struct IntervalTable {
    std::vector<double> lambda;  // knots
    std::vector<double> cdf;     // cumulative probability at knots
  };
  GammaProcessConfig config_;
  GroupedCensoringData grouped_;
  bool beta_path_ = false;
  std::vector<IntervalTable> tables_;
};

/// One-shot convenience wrapper around GammaProcessSampler.
std::vector<double> sample_gamma_process(const GroupedCensoringData& grouped,
                                         const GammaProcessConfig& config, Rng& rng);

/// Piecewise-linear cumulative hazard at u from increment values; u must not
/// exceed the last grid point.
double evaluate_cumhaz(const std::vector<double>& increments,
                       const GammaProcessConfig& config, double u);

/// Posterior-mean IPC weights collapsed into a single fixed draw:
/// values are log of the per-observation mean of exp{Lambda}.
CumHazDraw freeze_weights(const std::vector<CumHazDraw>& draws);

}  // namespace rmstbart

#endif

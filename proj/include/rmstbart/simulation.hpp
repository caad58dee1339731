#ifndef RMSTBART_SIMULATION_HPP
#define RMSTBART_SIMULATION_HPP

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "rmstbart/rng.hpp"
#include "rmstbart/survival_data.hpp"

namespace rmstbart {

enum class ScenarioFamily { friedman, abs_linear };
enum class CensoringScenario { noninf_gamma, informative, none };

ScenarioFamily family_from_name(const std::string& name);
const char* family_name(ScenarioFamily f);
CensoringScenario censoring_scenario_from_name(const std::string& name);
const char* censoring_scenario_name(CensoringScenario c);

/// One simulation scenario. `rate` is the gamma rate r under noninf_gamma
/// censoring and the gamma shape r_D under informative censoring.
struct ScenarioConfig {
  ScenarioFamily family = ScenarioFamily::friedman;
  std::size_t n = 1000;
  std::size_t n_test = 1000;
  std::size_t p = 10;
  double tau = 25.0;  // default 5 for abs_linear
  CensoringScenario censoring = CensoringScenario::noninf_gamma;
  double rate = 0.1;
  std::size_t replications = 1;
  std::uint64_t seed = 1;
  // abs_linear signal coefficients for the first five covariates
  std::vector<double> beta = {2.0, 2.0, 1.0, 1.0, 0.5};

  void validate() const;
  static double default_tau(ScenarioFamily f) {
    return f == ScenarioFamily::friedman ? 25.0 : 5.0;
  }
};

/// Friedman's test function 10 sin(pi x1 x2) + 20 (x3 - 0.5)^2 + 10 x4 + 5 x5;
/// coordinates past the fifth are ignored.
double friedman_fn(const double* x, std::size_t p);

/// Survival time with conditional mean f: Gamma(f(1+f), 1+f).
double draw_survival(double f_val, Rng& rng);

/// Closed-form tau-restricted mean of the gamma outcome model:
/// f F(tau; 1 + f(1+f), 1+f) + tau [1 - F(tau; f(1+f), 1+f)].
double true_rmst_gamma_outcome(double f_val, double tau);

struct ScenarioData {
  SurvivalDataset train;
  std::vector<double> test_x;      // n_test x p row-major
  std::vector<double> test_truth;  // true RMST at each test row
  double censor_fraction = 0.0;
};

/// Covariates, outcomes, censoring, and test-set truth for one replication.
ScenarioData gen_scenario(const ScenarioConfig& config, Rng& rng);

/// Root-mean-squared error over one replication's test points.
double rmse_metric(const std::vector<double>& predictions, const std::vector<double>& truths);

/// Fraction of test points whose truth lies inside [lower, upper].
double coverage_metric(const std::vector<double>& lower, const std::vector<double>& upper,
                       const std::vector<double>& truths);

}  // namespace rmstbart

#endif

#include "rmstbart/simulation.hpp"

#include <cmath>
#include <limits>

#include "rmstbart/errors.hpp"
#include "rmstbart/special.hpp"

namespace rmstbart {

ScenarioFamily family_from_name(const std::string& name) {
  if (name == "friedman") return ScenarioFamily::friedman;
  if (name == "abs-linear") return ScenarioFamily::abs_linear;
  throw config_error("unknown scenario family: " + name);
}

const char* family_name(ScenarioFamily f) {
  return f == ScenarioFamily::friedman ? "friedman" : "abs-linear";
}

CensoringScenario censoring_scenario_from_name(const std::string& name) {
  if (name == "gamma") return CensoringScenario::noninf_gamma;
  if (name == "informative") return CensoringScenario::informative;
  if (name == "none") return CensoringScenario::none;
  throw config_error("unknown censoring scenario: " + name);
}

const char* censoring_scenario_name(CensoringScenario c) {
  switch (c) {
    case CensoringScenario::noninf_gamma:
      return "gamma";
    case CensoringScenario::informative:
      return "informative";
    case CensoringScenario::none:
      return "none";
  }
  return "gamma";
}

void ScenarioConfig::validate() const {
  if (n == 0 || n_test == 0) throw config_error("scenario sizes must be positive");
  if (p <= 5) throw config_error("both families need p > 5");
  if (!(tau > 0.0)) throw config_error("tau must be positive");
  if (censoring != CensoringScenario::none && !(rate > 0.0)) {
    throw config_error("censoring rate parameter must be positive");
  }
  if (replications == 0) throw config_error("replication count must be positive");
  if (family == ScenarioFamily::abs_linear && beta.size() != 5) {
    throw config_error("abs-linear needs exactly five signal coefficients");
  }
}

double friedman_fn(const double* x, std::size_t p) {
  if (p < 5) throw config_error("friedman_fn needs at least five coordinates");
  return 10.0 * std::sin(M_PI * x[0] * x[1]) + 20.0 * (x[2] - 0.5) * (x[2] - 0.5) +
         10.0 * x[3] + 5.0 * x[4];
}

double draw_survival(double f_val, Rng& rng) {
  if (!(f_val > 0.0)) throw config_error("draw_survival: conditional mean must be positive");
  const double rate = 1.0 + f_val;
  return sample_gamma(f_val * rate, rate, rng);
}

double true_rmst_gamma_outcome(double f_val, double tau) {
  if (!(f_val > 0.0) || !(tau > 0.0)) {
    throw config_error("true_rmst_gamma_outcome: positive arguments required");
  }
  const double rate = 1.0 + f_val;
  const double shape = f_val * rate;
  return f_val * gamma_cdf(tau, shape + 1.0, rate) + tau * (1.0 - gamma_cdf(tau, shape, rate));
}

namespace {

double signal_value(const ScenarioConfig& config, const double* x) {
  if (config.family == ScenarioFamily::friedman) return friedman_fn(x, config.p);
  double lin = 0.0;
  for (std::size_t j = 0; j < 5; ++j) lin += config.beta[j] * x[j];
  return std::fabs(lin);
}

void draw_covariates(const ScenarioConfig& config, Rng& rng, double* row) {
  if (config.family == ScenarioFamily::friedman) {
    for (std::size_t j = 0; j < config.p; ++j) row[j] = rng.uniform();
    return;
  }
  // AR(1) standard normals with autocorrelation 0.5
  const double rho = 0.5;
  const double innov_sd = std::sqrt(1.0 - rho * rho);
  row[0] = rng.normal();
  for (std::size_t j = 1; j < config.p; ++j) {
    row[j] = rho * row[j - 1] + innov_sd * rng.normal();
  }
}

// zero signal values break the gamma outcome draw; measure-zero event,
// nudged away from the boundary
double positive_signal(double f) { return std::max(f, 1e-12); }

}  // namespace

ScenarioData gen_scenario(const ScenarioConfig& config, Rng& rng) {
  config.validate();
  ScenarioData out;
  out.train.n = config.n;
  out.train.p = config.p;
  out.train.covariate_names.resize(config.p);
  for (std::size_t j = 0; j < config.p; ++j) {
    out.train.covariate_names[j] = "x" + std::to_string(j + 1);
  }
  out.train.covariates.resize(config.n * config.p);
  out.train.times.resize(config.n);
  out.train.events.resize(config.n);

  std::size_t censored = 0;
  for (std::size_t i = 0; i < config.n; ++i) {
    double* row = out.train.covariates.data() + i * config.p;
    draw_covariates(config, rng, row);
    const double f = positive_signal(signal_value(config, row));
    const double t = draw_survival(f, rng);
    double c = std::numeric_limits<double>::infinity();
    if (config.censoring == CensoringScenario::noninf_gamma) {
      c = sample_gamma(3.2, config.rate, rng);
    } else if (config.censoring == CensoringScenario::informative) {
      c = sample_gamma(config.rate, 0.01 * f, rng);
    }
    if (t <= c) {
      out.train.times[i] = t;
      out.train.events[i] = 1;
    } else {
      out.train.times[i] = c;
      out.train.events[i] = 0;
      ++censored;
    }
  }
  out.censor_fraction = static_cast<double>(censored) / static_cast<double>(config.n);

  out.test_x.resize(config.n_test * config.p);
  out.test_truth.resize(config.n_test);
  for (std::size_t i = 0; i < config.n_test; ++i) {
    double* row = out.test_x.data() + i * config.p;
    draw_covariates(config, rng, row);
    const double f = positive_signal(signal_value(config, row));
    out.test_truth[i] = true_rmst_gamma_outcome(f, config.tau);
  }
  return out;
}

double rmse_metric(const std::vector<double>& predictions, const std::vector<double>& truths) {
  if (predictions.size() != truths.size() || predictions.empty()) {
    throw config_error("rmse_metric: length mismatch");
  }
  double ss = 0.0;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    const double d = predictions[i] - truths[i];
    ss += d * d;
  }
  return std::sqrt(ss / static_cast<double>(predictions.size()));
}

double coverage_metric(const std::vector<double>& lower, const std::vector<double>& upper,
                       const std::vector<double>& truths) {
  const std::size_t n = truths.size();
  if (lower.size() != n || upper.size() != n || n == 0) {
    throw config_error("coverage_metric: length mismatch");
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(lower[i] <= upper[i])) throw config_error("coverage_metric: lower exceeds upper");
    if (lower[i] <= truths[i] && truths[i] <= upper[i]) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

}  // namespace rmstbart

#include "rmstbart/censoring.hpp"

#include <algorithm>
#include <cmath>

#include "rmstbart/errors.hpp"

namespace rmstbart {

void GammaProcessConfig::validate() const {
  if (grid.empty()) throw config_error("gamma process grid is empty");
  double prev = 0.0;
  for (double s : grid) {
    if (!(s > prev)) throw config_error("gamma process grid must be strictly increasing and positive");
    prev = s;
  }
  if (!(kappa0 > 0.0)) throw config_error("kappa0 must be positive");
  if (!alpha_increments.empty()) {
    if (alpha_increments.size() != grid.size()) {
      throw config_error("alpha increments must match grid length");
    }
    for (double a : alpha_increments) {
      if (!(a > 0.0)) throw config_error("alpha increments must be positive");
    }
  }
}

GammaProcessConfig default_gamma_process_config(const std::vector<double>& u_tau,
                                                std::size_t max_bins) {
  if (u_tau.empty()) throw config_error("cannot build censoring grid from empty data");
  std::vector<double> distinct = u_tau;
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  while (!distinct.empty() && distinct.front() <= 0.0) distinct.erase(distinct.begin());
  if (distinct.empty()) throw config_error("cannot build censoring grid: no positive follow-up times");

  GammaProcessConfig config;
  const std::size_t bins = std::min(max_bins, distinct.size());
  // interval ends at empirical quantiles, last point at the maximum
  for (std::size_t k = 1; k <= bins; ++k) {
    const std::size_t idx = k * distinct.size() / bins - 1;
    const double s = distinct[idx];
    if (config.grid.empty() || s > config.grid.back()) config.grid.push_back(s);
  }
  return config;
}

GroupedCensoringData group_censoring(const TruncatedDataset& trunc,
                                     const std::vector<int>& original_events,
                                     const GammaProcessConfig& config) {
  config.validate();
  const std::size_t n = trunc.size();
  if (original_events.size() != n) {
    throw config_error("group_censoring: event vector length mismatch");
  }
  const std::size_t n_bins = config.grid.size();
  const double binv_tau = trunc.b_inverse_tau();
  for (double u : trunc.u_tau) {
    if (u > config.grid.back()) {
      throw config_error("gamma process grid does not cover the data range");
    }
  }
  GroupedCensoringData out;
  out.censor_events.assign(n_bins, 0);
  out.at_risk.assign(n_bins, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = trunc.u_tau[i];
    const bool censoring_event = original_events[i] == 0 && u < binv_tau;
    for (std::size_t j = 0; j < n_bins; ++j) {
      const double lo = j == 0 ? 0.0 : config.grid[j - 1];
      if (u > lo) out.at_risk[j]++;
      if (censoring_event && u > lo && u <= config.grid[j]) out.censor_events[j]++;
    }
  }
  return out;
}

namespace {

// unnormalized log density of one hazard increment given (E, R)
double increment_log_density(double lambda, double c_shape, double b_rate, long e) {
  if (!(lambda > 0.0)) return -std::numeric_limits<double>::infinity();
  double lp = (c_shape - 1.0) * std::log(lambda) - b_rate * lambda;
  if (e > 0) lp += static_cast<double>(e) * std::log1p(-std::exp(-lambda));
  return lp;
}

}  // namespace

GammaProcessSampler::GammaProcessSampler(const GroupedCensoringData& grouped,
                                         const GammaProcessConfig& config)
    : config_(config), grouped_(grouped) {
  config_.validate();
  const std::size_t n_bins = config_.grid.size();
  if (grouped_.censor_events.size() != n_bins || grouped_.at_risk.size() != n_bins) {
    throw config_error("grouped censoring data does not match grid length");
  }
  for (std::size_t j = 0; j < n_bins; ++j) {
    if (grouped_.censor_events[j] < 0 || grouped_.censor_events[j] > grouped_.at_risk[j]) {
      throw config_error("grouped censoring data violates E_j <= R_j");
    }
  }
  bool unit = config_.kappa0 == 1.0;
  for (std::size_t j = 0; unit && j < n_bins; ++j) {
    if (config_.alpha_increment(j) != 1.0) unit = false;
  }
  beta_path_ = unit;
  if (beta_path_) return;

  // tabulated inverse CDF per interval for non-default hyperparameters
  tables_.resize(n_bins);
  for (std::size_t j = 0; j < n_bins; ++j) {
    const double c = config_.kappa0 * config_.alpha_increment(j);
    const double b = static_cast<double>(grouped_.at_risk[j] - grouped_.censor_events[j]) +
                     config_.kappa0;
    const long e = grouped_.censor_events[j];
    // upper end: far tail of the dominating Gamma(c + E, b) envelope
    const double shape_hi = c + static_cast<double>(e);
    double hi = (shape_hi + 40.0 * std::sqrt(shape_hi) + 40.0) / b;
    const int n_knots = 4096;
    auto& table = tables_[j];
    table.lambda.resize(static_cast<std::size_t>(n_knots) + 1);
    table.cdf.assign(static_cast<std::size_t>(n_knots) + 1, 0.0);
    // knots concentrate near zero via a sqrt stretch
    for (int k = 0; k <= n_knots; ++k) {
      const double frac = static_cast<double>(k) / n_knots;
      table.lambda[static_cast<std::size_t>(k)] = hi * frac * frac;
    }
    // log densities at knots, then Simpson on each sub-interval
    double log_max = -std::numeric_limits<double>::infinity();
    std::vector<double> lp(table.lambda.size());
    for (std::size_t k = 0; k < lp.size(); ++k) {
      lp[k] = increment_log_density(table.lambda[k], c, b, e);
      log_max = std::max(log_max, lp[k]);
    }
    double acc = 0.0;
    for (std::size_t k = 1; k < lp.size(); ++k) {
      const double a0 = table.lambda[k - 1];
      const double a1 = table.lambda[k];
      const double mid = 0.5 * (a0 + a1);
      const double f0 = std::exp(lp[k - 1] - log_max);
      const double fm = std::exp(increment_log_density(mid, c, b, e) - log_max);
      const double f1 = std::exp(lp[k] - log_max);
      acc += (a1 - a0) / 6.0 * (f0 + 4.0 * fm + f1);
      table.cdf[k] = acc;
    }
    if (!(acc > 0.0)) throw numeric_error("gamma process: degenerate increment density");
    for (double& v : table.cdf) v /= acc;
  }
}

std::vector<double> GammaProcessSampler::draw(Rng& rng) const {
  const std::size_t n_bins = config_.grid.size();
  std::vector<double> lambda(n_bins);
  for (std::size_t j = 0; j < n_bins; ++j) {
    const long e = grouped_.censor_events[j];
    const long r = grouped_.at_risk[j];
    if (beta_path_) {
      // lambda = -log V with V ~ Beta(R - E + 1, E + 1); E = 0 reduces to
      // Exponential(R + 1)
      const double v = sample_beta(static_cast<double>(r - e) + 1.0,
                                   static_cast<double>(e) + 1.0, rng);
      lambda[j] = -std::log(v);
    } else {
      const auto& table = tables_[j];
      const double u = rng.uniform_pos();
      const auto it = std::lower_bound(table.cdf.begin(), table.cdf.end(), u);
      std::size_t k = static_cast<std::size_t>(it - table.cdf.begin());
      if (k == 0) k = 1;
      if (k >= table.cdf.size()) k = table.cdf.size() - 1;
      const double c0 = table.cdf[k - 1];
      const double c1 = table.cdf[k];
      const double w = c1 > c0 ? (u - c0) / (c1 - c0) : 0.5;
      lambda[j] = table.lambda[k - 1] + w * (table.lambda[k] - table.lambda[k - 1]);
    }
  }
  return lambda;
}

std::vector<double> sample_gamma_process(const GroupedCensoringData& grouped,
                                         const GammaProcessConfig& config, Rng& rng) {
  return GammaProcessSampler(grouped, config).draw(rng);
}

double evaluate_cumhaz(const std::vector<double>& increments,
                       const GammaProcessConfig& config, double u) {
  if (increments.size() != config.grid.size()) {
    throw config_error("evaluate_cumhaz: increment count does not match grid");
  }
  if (u < 0.0) throw config_error("evaluate_cumhaz: negative time");
  if (u > config.grid.back()) {
    throw numeric_error("evaluate_cumhaz: time beyond the last grid point");
  }
  double total = 0.0;
  double lo = 0.0;
  for (std::size_t j = 0; j < config.grid.size(); ++j) {
    const double hi = config.grid[j];
    if (u <= hi) {
      total += increments[j] * (u - lo) / (hi - lo);
      return total;
    }
    total += increments[j];
    lo = hi;
  }
  return total;
}

CumHazDraw freeze_weights(const std::vector<CumHazDraw>& draws) {
  if (draws.empty()) throw config_error("freeze_weights: no draws");
  const std::size_t n = draws.front().values.size();
  CumHazDraw out;
  out.tag = CensoringTag::fixed;
  out.values.assign(n, 0.0);
  for (const auto& d : draws) {
    if (d.values.size() != n) throw config_error("freeze_weights: draw lengths differ");
    for (std::size_t i = 0; i < n; ++i) out.values[i] += std::exp(d.values[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = std::log(out.values[i] / static_cast<double>(draws.size()));
  }
  return out;
}

}  // namespace rmstbart

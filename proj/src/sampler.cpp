#include "rmstbart/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rmstbart/errors.hpp"
#include "rmstbart/kernels.hpp"
#include "rmstbart/weibull_aft.hpp"

namespace rmstbart {

namespace {

constexpr std::uint64_t kChainStreamTag = 0x636861696eULL;  // "chain"
constexpr std::uint64_t kCvStreamTag = 0x6376ULL;           // "cv"

}  // namespace

const char* censoring_choice_name(CensoringChoice c) {
  switch (c) {
    case CensoringChoice::noninformative:
      return "noninf";
    case CensoringChoice::dependent:
      return "dep";
    case CensoringChoice::fixed:
      return "fixed";
  }
  return "noninf";
}

CensoringChoice censoring_choice_from_name(const std::string& name) {
  if (name == "noninf") return CensoringChoice::noninformative;
  if (name == "dep") return CensoringChoice::dependent;
  if (name == "fixed") return CensoringChoice::fixed;
  throw config_error("unknown censoring model: " + name);
}

void SamplerConfig::validate() const {
  if (n_trees == 0) throw config_error("number of trees must be positive");
  if (n_iter == 0 || thin == 0 || chains == 0) {
    throw config_error("iteration counts and chains must be positive");
  }
  if (burn_in >= n_iter) throw config_error("burn-in must be smaller than the iteration count");
  if ((n_iter - burn_in) / thin == 0) {
    throw config_error("no retained draws: increase iterations or reduce thinning");
  }
  if (!(kappa > 0.0)) throw config_error("kappa must be positive");
  if (!(weight_cap >= 1.0)) throw config_error("weight cap must be at least 1");
  if (cens_grid_size == 0 || grid_size == 0) throw config_error("grid sizes must be positive");
}

double default_eta(double sigma_r2, bool paper_rule) {
  if (!(sigma_r2 > 0.0)) throw config_error("default_eta: sigma_r2 must be positive");
  const double eta = paper_rule ? sigma_r2 / 2.0 : 1.0 / (2.0 * sigma_r2);
  return std::min(eta, 1e6);
}

double default_sigma_mu(const TruncatedDataset& trunc, std::size_t n_trees, double kappa) {
  if (n_trees == 0 || !(kappa > 0.0)) throw config_error("default_sigma_mu: bad parameters");
  double y_min = std::numeric_limits<double>::infinity();
  bool any_event = false;
  for (std::size_t i = 0; i < trunc.size(); ++i) {
    if (trunc.delta_tau[i] == 1) {
      any_event = true;
      y_min = std::min(y_min, trunc.y_tau[i]);
    }
  }
  if (!any_event) throw config_error("default_sigma_mu: no observed events");
  const double range = (trunc.tau - trunc.mu_hat_b) - y_min;
  if (!(range > 0.0)) throw config_error("default_sigma_mu: outcome range at tau is zero");
  return range / (2.0 * kappa * std::sqrt(static_cast<double>(n_trees)));
}

namespace {

struct ChainOutput {
  std::vector<double> f_draws;
  std::vector<double> eval_draws;
  std::vector<double> importance;
  std::vector<double> hazard_mean;
  MoveCounts moves;
  std::uint64_t capped = 0;
  std::vector<Forest> forests;
};

// builds loss weights w_i = delta_tau_i * min(exp(Lambda_i), cap)
std::uint64_t build_weights(const std::vector<double>& lambda,
                            const std::vector<int>& delta_tau, double cap,
                            std::vector<double>& w) {
  std::uint64_t capped = 0;
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (delta_tau[i] == 0) {
      w[i] = 0.0;
      continue;
    }
    const double raw = std::exp(lambda[i]);
    if (raw > cap) {
      w[i] = cap;
      ++capped;
    } else {
      w[i] = raw;
    }
  }
  return capped;
}

// posterior sampler for the censoring cumulative hazard at the truncated
// follow-up times, under either censoring model or a frozen draw
class HazardSampler {
 public:
  HazardSampler(const SamplerConfig& config, const TruncatedDataset& trunc,
                const SurvivalDataset& data, const CutpointGrid* grid,
                const CumHazDraw* external_fixed, Rng& rng)
      : trunc_(&trunc), data_(&data) {
    if (external_fixed) {
      if (external_fixed->values.size() != data.n) {
        throw config_error("fixed hazard draw length does not match the data");
      }
      current_ = *external_fixed;
      frozen_ = true;
      return;
    }
    const bool dependent = config.censoring == CensoringChoice::dependent;
    if (dependent) {
      AftCensoringConfig aft = config.aft;
      aft.tree_prior = config.tree_prior;
      aft_ = std::make_unique<AftCensoringModel>(data, grid, aft, rng);
    } else {
      gp_config_ = default_gamma_process_config(trunc.u_tau, config.cens_grid_size);
      grouped_ = group_censoring(trunc, data.events, gp_config_);
      gp_ = std::make_unique<GammaProcessSampler>(grouped_, gp_config_);
    }
    const bool freeze =
        config.fixed_weights || config.censoring == CensoringChoice::fixed;
    if (freeze) {
      const std::size_t kept = (config.n_iter - config.burn_in) / config.thin;
      const std::size_t n_pre = std::max<std::size_t>(kept, 50);
      std::vector<CumHazDraw> pre(n_pre);
      for (auto& d : pre) d = next_draw(rng);
      current_ = freeze_weights(pre);
      frozen_ = true;
    } else {
      current_ = next_draw(rng);
    }
  }

  const CumHazDraw& current() const { return current_; }
  bool frozen() const { return frozen_; }

  void step(Rng& rng) {
    if (frozen_) return;
    current_ = next_draw(rng);
  }

 private:
  CumHazDraw next_draw(Rng& rng) {
    CumHazDraw draw;
    draw.values.resize(data_->n);
    if (aft_) {
      aft_->gibbs_step(rng);
      for (std::size_t i = 0; i < data_->n; ++i) {
        draw.values[i] = aft_->cumhaz(trunc_->u_tau[i], data_->row(i));
      }
      draw.tag = CensoringTag::informative;
    } else {
      const std::vector<double> lambda = gp_->draw(rng);
      for (std::size_t i = 0; i < data_->n; ++i) {
        draw.values[i] = evaluate_cumhaz(lambda, gp_config_, trunc_->u_tau[i]);
      }
      draw.tag = CensoringTag::noninformative;
    }
    return draw;
  }

  const TruncatedDataset* trunc_;
  const SurvivalDataset* data_;
  GammaProcessConfig gp_config_;
  GroupedCensoringData grouped_;
  std::unique_ptr<GammaProcessSampler> gp_;
  std::unique_ptr<AftCensoringModel> aft_;
  CumHazDraw current_;
  bool frozen_ = false;
};

ChainOutput run_chain(const SamplerConfig& config, const TruncatedDataset& trunc,
                      const SurvivalDataset& data, const CutpointGrid& grid,
                      double eta, double sigma_mu, std::uint64_t stream_context,
                      std::size_t chain_idx, const double* x_eval, std::size_t n_eval,
                      const CumHazDraw* external_fixed) {
  Rng rng = Rng(config.seed, stream_context).derive(kChainStreamTag, chain_idx);
  const std::size_t n = data.n;
  const std::size_t kept_target = (config.n_iter - config.burn_in) / config.thin;

  HazardSampler hazard(config, trunc, data, &grid, external_fixed, rng);

  LeafPriorParams leaf_prior;
  leaf_prior.sigma_mu = sigma_mu;
  leaf_prior.mu_mu = 0.0;
  ForestSampler forest(config.n_trees, data.covariates.data(), n, data.p, &grid,
                       config.tree_prior, leaf_prior);

  std::vector<double> weights(n, 0.0);

  ChainOutput out;
  out.f_draws.reserve(kept_target * n);
  out.eval_draws.reserve(kept_target * n_eval);
  out.importance.reserve(kept_target * data.p);
  out.hazard_mean.reserve(kept_target);
  if (config.store_forests) out.forests.reserve(kept_target);
  std::vector<double> eval_buf(n_eval);
  std::vector<double> split_buf(data.p);

  out.capped += build_weights(hazard.current().values, trunc.delta_tau,
                              config.weight_cap, weights);
  for (std::size_t t = 1; t <= config.n_iter; ++t) {
    if (t > 1 && !hazard.frozen()) {
      // the cumulative-hazard redraw closing iteration t-1
      hazard.step(rng);
      out.capped += build_weights(hazard.current().values, trunc.delta_tau,
                                  config.weight_cap, weights);
    }
    forest.sweep(trunc.y_tau, weights, eta, rng);

    const bool keep = t > config.burn_in && (t - config.burn_in) % config.thin == 0;
    if (keep) {
      const std::vector<double>& fhat = forest.fitted();
      for (std::size_t i = 0; i < n; ++i) out.f_draws.push_back(fhat[i] + trunc.mu_hat_b);
      if (n_eval > 0) {
        predict_forest_serial(forest.forest(), grid, x_eval, n_eval, data.p,
                              eval_buf.data());
        for (std::size_t i = 0; i < n_eval; ++i) {
          out.eval_draws.push_back(eval_buf[i] + trunc.mu_hat_b);
        }
      }
      std::fill(split_buf.begin(), split_buf.end(), 0.0);
      forest.count_splits(split_buf.data());
      out.importance.insert(out.importance.end(), split_buf.begin(), split_buf.end());
      const double lam_sum = std::accumulate(hazard.current().values.begin(),
                                             hazard.current().values.end(), 0.0);
      out.hazard_mean.push_back(lam_sum / static_cast<double>(n));
      if (config.store_forests) out.forests.push_back(forest.forest());
    }
  }
  out.moves = forest.move_counts();
  return out;
}

PosteriorDraws run_mcmc_impl(const SamplerConfig& config, const TruncatedDataset& trunc,
                             const SurvivalDataset& data, const double* x_eval,
                             std::size_t n_eval, const CumHazDraw* external_fixed,
                             std::uint64_t stream_context) {
  config.validate();
  data.validate();
  if (trunc.size() != data.n) throw config_error("truncated data does not match the dataset");
  std::size_t n_events = 0;
  for (int d : trunc.delta_tau) n_events += static_cast<std::size_t>(d);
  if (n_events == 0) {
    throw numeric_error("cannot fit: no observed events at tau (all loss weights are zero)");
  }

  PosteriorDraws draws;
  draws.n_obs = data.n;
  draws.n_eval = n_eval;
  draws.n_vars = data.p;
  draws.n_kept = (config.n_iter - config.burn_in) / config.thin;
  draws.mu_hat_b = trunc.mu_hat_b;
  draws.sigma_r2 = config.sigma_r2 > 0.0 ? config.sigma_r2 : default_sigma_r2(trunc, data);
  draws.eta = config.eta > 0.0 ? config.eta : default_eta(draws.sigma_r2, config.eta_paper_rule);
  draws.sigma_mu = config.sigma_mu > 0.0
                       ? config.sigma_mu
                       : default_sigma_mu(trunc, config.n_trees, config.kappa);
  draws.grid = CutpointGrid::from_data(data.covariates.data(), data.n, data.p,
                                       config.grid_size);

  std::vector<ChainOutput> chains(config.chains);
  const std::ptrdiff_t n_chains = static_cast<std::ptrdiff_t>(config.chains);
#pragma omp parallel for schedule(dynamic) if (n_chains > 1)
  for (std::ptrdiff_t c = 0; c < n_chains; ++c) {
    chains[static_cast<std::size_t>(c)] =
        run_chain(config, trunc, data, draws.grid, draws.eta, draws.sigma_mu,
                  stream_context, static_cast<std::size_t>(c), x_eval, n_eval,
                  external_fixed);
  }

  for (const auto& ch : chains) {
    draws.f_draws.insert(draws.f_draws.end(), ch.f_draws.begin(), ch.f_draws.end());
    draws.eval_draws.insert(draws.eval_draws.end(), ch.eval_draws.begin(),
                            ch.eval_draws.end());
    draws.importance.insert(draws.importance.end(), ch.importance.begin(),
                            ch.importance.end());
    draws.hazard_mean.insert(draws.hazard_mean.end(), ch.hazard_mean.begin(),
                             ch.hazard_mean.end());
    draws.moves.grow_proposed += ch.moves.grow_proposed;
    draws.moves.grow_accepted += ch.moves.grow_accepted;
    draws.moves.prune_proposed += ch.moves.prune_proposed;
    draws.moves.prune_accepted += ch.moves.prune_accepted;
    draws.moves.change_proposed += ch.moves.change_proposed;
    draws.moves.change_accepted += ch.moves.change_accepted;
    draws.capped_weight_events += ch.capped;
    draws.forests.insert(draws.forests.end(), ch.forests.begin(), ch.forests.end());
  }
  for (double v : draws.f_draws) {
    if (!std::isfinite(v)) throw numeric_error("non-finite posterior draw");
  }
  return draws;
}

}  // namespace

PosteriorDraws run_mcmc(const SamplerConfig& config, const TruncatedDataset& trunc,
                        const SurvivalDataset& data, const double* x_eval,
                        std::size_t n_eval) {
  return run_mcmc_impl(config, trunc, data, x_eval, n_eval, nullptr, 0);
}

PosteriorDraws run_mcmc_fixed_hazard(const SamplerConfig& config,
                                     const TruncatedDataset& trunc,
                                     const SurvivalDataset& data, const CumHazDraw& fixed,
                                     const double* x_eval, std::size_t n_eval) {
  return run_mcmc_impl(config, trunc, data, x_eval, n_eval, &fixed, 0);
}

std::vector<IntervalSummary> posterior_summary(const std::vector<double>& draws,
                                               std::size_t n_draws, std::size_t n_points,
                                               double level) {
  if (n_draws < 2) throw config_error("posterior_summary: need at least two draws");
  if (!(level > 0.0) || !(level < 1.0)) throw config_error("posterior_summary: level in (0,1)");
  if (draws.size() != n_draws * n_points) {
    throw config_error("posterior_summary: draw matrix shape mismatch");
  }
  const double alpha = 0.5 * (1.0 - level);
  std::vector<IntervalSummary> out(n_points);
  std::vector<double> col(n_draws);
  for (std::size_t j = 0; j < n_points; ++j) {
    double mean = 0.0;
    for (std::size_t d = 0; d < n_draws; ++d) {
      col[d] = draws[d * n_points + j];
      mean += col[d];
    }
    std::sort(col.begin(), col.end());
    auto quantile = [&](double p) {
      const double h = (static_cast<double>(n_draws) - 1.0) * p;
      const std::size_t lo = static_cast<std::size_t>(std::floor(h));
      const std::size_t hi = std::min(lo + 1, n_draws - 1);
      return col[lo] + (h - std::floor(h)) * (col[hi] - col[lo]);
    };
    out[j].mean = mean / static_cast<double>(n_draws);
    out[j].lower = quantile(alpha);
    out[j].upper = quantile(1.0 - alpha);
  }
  return out;
}

std::vector<double> predict_new(const std::vector<Forest>& forests, const CutpointGrid& grid,
                                const double* x, std::size_t n, std::size_t p,
                                double mu_hat_b) {
  if (grid.n_vars() != p) throw input_error("prediction rows do not match the model's covariates");
  std::vector<double> out(forests.size() * n);
  predict_draws_parallel(forests, grid, x, n, p, mu_hat_b, out.data());
  return out;
}

std::vector<double> variable_importance(const PosteriorDraws& draws) {
  const std::size_t total = draws.importance.size() / std::max<std::size_t>(draws.n_vars, 1);
  std::vector<double> out(draws.n_vars, 0.0);
  if (total == 0) throw config_error("variable_importance: no retained draws");
  for (std::size_t d = 0; d < total; ++d) {
    for (std::size_t j = 0; j < draws.n_vars; ++j) {
      out[j] += draws.importance[d * draws.n_vars + j];
    }
  }
  for (double& v : out) v /= static_cast<double>(total);
  return out;
}

std::vector<double> partial_dependence(const std::vector<Forest>& forests,
                                       const CutpointGrid& grid, const SurvivalDataset& data,
                                       std::size_t var, const std::vector<double>& u_values,
                                       double mu_hat_b) {
  if (var >= data.p) throw config_error("partial_dependence: variable index out of range");
  if (forests.empty()) throw config_error("partial_dependence: no forest draws");
  return partial_dependence_parallel(forests, grid, data.covariates.data(), data.n, data.p,
                                     var, u_values, mu_hat_b);
}

namespace {

SurvivalDataset subset_rows(const SurvivalDataset& data, const std::vector<std::size_t>& rows) {
  SurvivalDataset out;
  out.n = rows.size();
  out.p = data.p;
  out.covariate_names = data.covariate_names;
  out.times.reserve(rows.size());
  out.events.reserve(rows.size());
  out.covariates.reserve(rows.size() * data.p);
  for (std::size_t i : rows) {
    out.times.push_back(data.times[i]);
    out.events.push_back(data.events[i]);
    for (std::size_t j = 0; j < data.p; ++j) out.covariates.push_back(data.x(i, j));
  }
  return out;
}

// fold labels with every fold holding at least one event at tau; reshuffles
// once before giving up
std::vector<std::size_t> assign_folds(const SurvivalDataset& data,
                                      const TruncatedDataset& trunc, std::size_t folds,
                                      Rng& rng) {
  const std::size_t n = data.n;
  std::vector<std::size_t> order(n);
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = n; i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.uniform_index(i));
      std::swap(order[i - 1], order[j]);
    }
    std::vector<std::size_t> label(n);
    for (std::size_t k = 0; k < n; ++k) label[order[k]] = k % folds;
    std::vector<std::size_t> events_in(folds, 0);
    for (std::size_t i = 0; i < n; ++i) {
      if (trunc.delta_tau[i] == 1) events_in[label[i]]++;
    }
    const bool ok = std::all_of(events_in.begin(), events_in.end(),
                                [&](std::size_t e) { return e >= 1 && e < static_cast<std::size_t>(
                                    std::count(trunc.delta_tau.begin(), trunc.delta_tau.end(), 1)); });
    if (ok) return label;
  }
  throw numeric_error("cross-validation: a fold has no events even after reshuffling");
}

}  // namespace

EtaSelection cross_validate_eta(EtaSelection selection, const SurvivalDataset& data,
                                double tau, TimeTransform transform,
                                const SamplerConfig& config_template) {
  if (selection.folds < 2) throw config_error("cross-validation needs at least 2 folds");
  if (data.n < selection.folds) throw config_error("fewer rows than folds");
  if (selection.multipliers.empty()) throw config_error("no sigma_r2 candidates");
  for (double m : selection.multipliers) {
    if (!(m > 0.0)) throw config_error("sigma_r2 multipliers must be positive");
  }

  const TruncatedDataset trunc_full = apply_truncation(data, tau, transform);
  if (!(selection.sigma_r2_tilde > 0.0)) {
    selection.sigma_r2_tilde = default_sigma_r2(trunc_full, data);
  }

  Rng fold_rng = Rng(config_template.seed, 0).derive(kCvStreamTag, 0);
  const std::vector<std::size_t> label =
      assign_folds(data, trunc_full, selection.folds, fold_rng);

  selection.scores.assign(selection.multipliers.size(), 0.0);
  double best_score = std::numeric_limits<double>::infinity();
  double best_eta = 0.0;
  double best_sigma = 0.0;

  for (std::size_t c = 0; c < selection.multipliers.size(); ++c) {
    const double sigma_cand = selection.multipliers[c] * selection.sigma_r2_tilde;
    const double eta_cand = default_eta(sigma_cand, config_template.eta_paper_rule);
    double fold_total = 0.0;
    for (std::size_t f = 0; f < selection.folds; ++f) {
      std::vector<std::size_t> train_rows, test_rows;
      for (std::size_t i = 0; i < data.n; ++i) {
        (label[i] == f ? test_rows : train_rows).push_back(i);
      }
      const SurvivalDataset train = subset_rows(data, train_rows);
      const SurvivalDataset test = subset_rows(data, test_rows);
      const TruncatedDataset trunc_train = apply_truncation(train, tau, transform);

      SamplerConfig cfg = config_template;
      cfg.eta = eta_cand;
      cfg.sigma_r2 = sigma_cand;
      cfg.chains = 1;

      const PosteriorDraws fit =
          run_mcmc_impl(cfg, trunc_train, train, test.covariates.data(), test.n, nullptr,
                        (c + 1) * 1000003ULL + f + 1);
      const std::size_t kept = fit.total_kept();
      std::vector<double> pred(test.n, 0.0);
      for (std::size_t d = 0; d < kept; ++d) {
        for (std::size_t i = 0; i < test.n; ++i) pred[i] += fit.eval_draws[d * test.n + i];
      }
      for (double& v : pred) v /= static_cast<double>(kept);

      // IPCW squared-error test loss with KM censoring weights on the fold
      const TruncatedDataset trunc_test = apply_truncation(test, tau, transform);
      const StepFunction g_test = km_censoring_survival(test);
      double loss = 0.0;
      for (std::size_t i = 0; i < test.n; ++i) {
        if (trunc_test.delta_tau[i] == 0) continue;
        const double g = g_test.left_limit(trunc_test.u_tau[i]);
        if (!(g > 0.0)) continue;  // zero-weight event carries no loss information
        const double b_u = trunc_test.y_tau[i] + trunc_test.mu_hat_b;
        const double diff = b_u - pred[i];
        loss += diff * diff / g;
      }
      fold_total += loss / static_cast<double>(test.n);
    }
    const double score = fold_total / static_cast<double>(selection.folds);
    selection.scores[c] = score;
    if (score < best_score || (score == best_score && eta_cand < best_eta)) {
      best_score = score;
      best_eta = eta_cand;
      best_sigma = sigma_cand;
    }
  }
  selection.chosen_eta = best_eta;
  selection.chosen_sigma_r2 = best_sigma;
  return selection;
}

}  // namespace rmstbart

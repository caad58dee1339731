// Command-line driver: fit / predict / cv / simulate / importance / pdp.
//
// Exit codes: 0 success, 2 input error, 3 configuration error, 4 numerical
// failure. Progress goes to stderr; all result files are written atomically.

#include <omp.h>

#include <CLI11.hpp>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "rmstbart/errors.hpp"
#include "rmstbart/harness.hpp"
#include "rmstbart/model_io.hpp"
#include "rmstbart/sampler.hpp"
#include "rmstbart/simulation.hpp"
#include "rmstbart/weibull_aft.hpp"

namespace rb = rmstbart;

namespace {

struct DataOptions {
  std::string path;
  std::string time_col = "time";
  std::string event_col = "event";
  std::string delimiter = ",";
  double tau = 0.0;
  std::string transform = "identity";
};

struct SamplerOptions {
  rb::SamplerConfig config;
  std::string censoring = "noninf";
  std::size_t cens_trees = 200;

  rb::SamplerConfig resolve() const {
    rb::SamplerConfig out = config;
    out.censoring = rb::censoring_choice_from_name(censoring);
    out.aft.n_trees = cens_trees;
    out.aft.kappa = config.kappa;
    return out;
  }
};

void add_data_options(CLI::App* cmd, DataOptions& opts, bool need_tau = true) {
  cmd->add_option("--data", opts.path, "Input CSV with a header row")->required();
  cmd->add_option("--time-col", opts.time_col, "Follow-up time column name")
      ->capture_default_str();
  cmd->add_option("--event-col", opts.event_col, "Event indicator column name (1=event, 0=censored)")
      ->capture_default_str();
  cmd->add_option("--delimiter", opts.delimiter, "Field delimiter")->capture_default_str();
  auto* tau = cmd->add_option("--tau", opts.tau, "Restriction point on the transformed time scale");
  if (need_tau) tau->required();
  cmd->add_option("--transform", opts.transform, "Time transform: identity or log")
      ->capture_default_str()
      ->check(CLI::IsMember({"identity", "log"}));
}

void add_sampler_options(CLI::App* cmd, SamplerOptions& opts) {
  cmd->add_option("--trees", opts.config.n_trees, "Number of trees H")->capture_default_str();
  cmd->add_option("--eta", opts.config.eta,
                  "Loss tuning parameter; 0 derives 1/(2 sigma_r2) from a Weibull AFT fit")
      ->capture_default_str();
  cmd->add_option("--sigma-r2", opts.config.sigma_r2,
                  "Residual variance behind the default eta; 0 estimates it")
      ->capture_default_str();
  cmd->add_option("--sigma-mu", opts.config.sigma_mu,
                  "Leaf prior scale; 0 applies the spread-based default")
      ->capture_default_str();
  cmd->add_option("--kappa", opts.config.kappa, "Divisor in the sigma-mu default")
      ->capture_default_str();
  cmd->add_option("--alpha-star", opts.config.tree_prior.alpha_star,
                  "Node split probability scale")
      ->capture_default_str();
  cmd->add_option("--beta-star", opts.config.tree_prior.beta_star, "Node depth penalty")
      ->capture_default_str();
  cmd->add_option("--iters", opts.config.n_iter, "MCMC iterations")->capture_default_str();
  cmd->add_option("--burnin", opts.config.burn_in, "Burn-in iterations")->capture_default_str();
  cmd->add_option("--thin", opts.config.thin, "Thinning interval")->capture_default_str();
  cmd->add_option("--censoring", opts.censoring,
                  "Censoring model: noninf (gamma process), dep (AFT trees), fixed (frozen weights)")
      ->capture_default_str()
      ->check(CLI::IsMember({"noninf", "dep", "fixed"}));
  cmd->add_flag("--fixed-weights", opts.config.fixed_weights,
                "Freeze the IPC weights at their posterior mean");
  cmd->add_option("--weight-cap", opts.config.weight_cap, "Upper bound on exp(Lambda) weights")
      ->capture_default_str();
  cmd->add_option("--cens-grid-size", opts.config.cens_grid_size,
                  "Gamma-process grid intervals")
      ->capture_default_str();
  cmd->add_option("--cens-trees", opts.cens_trees, "Trees in the dependent censoring forest")
      ->capture_default_str();
  cmd->add_option("--cutpoints", opts.config.grid_size, "Cutpoint grid size per variable")
      ->capture_default_str();
  cmd->add_option("--seed", opts.config.seed, "Random seed")->capture_default_str();
  cmd->add_option("--chains", opts.config.chains, "Independent chains")->capture_default_str();
  cmd->add_flag("--eta-paper-rule", opts.config.eta_paper_rule,
                "Audit switch: use eta = sigma_r2/2 instead of 1/(2 sigma_r2)");
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

void report_dropped(const rb::CsvLoadReport& report) {
  if (report.rows_dropped == 0) return;
  std::fprintf(stderr, "note: %zu row(s) with missing values dropped (rows", report.rows_dropped);
  for (std::size_t i = 0; i < report.dropped_rows.size() && i < 20; ++i) {
    std::fprintf(stderr, " %zu", report.dropped_rows[i]);
  }
  std::fprintf(stderr, report.dropped_rows.size() > 20 ? " ...)\n" : ")\n");
}

rb::TimeTransform parse_transform(const std::string& name) {
  return rb::transform_from_name(name);
}

std::string summary_csv(const std::vector<rb::IntervalSummary>& summary) {
  std::ostringstream out;
  out << "id,mean,lower,upper\n";
  for (std::size_t i = 0; i < summary.size(); ++i) {
    out << (i + 1) << ',' << format_double(summary[i].mean) << ','
        << format_double(summary[i].lower) << ',' << format_double(summary[i].upper) << '\n';
  }
  return out.str();
}

int cmd_fit(const DataOptions& data_opts, const SamplerOptions& sampler_opts,
            double level, const std::string& out_model, const std::string& out_summary) {
  rb::CsvLoadReport report;
  const rb::SurvivalDataset data =
      rb::load_csv(data_opts.path, data_opts.time_col, data_opts.event_col,
                   data_opts.delimiter.at(0), &report);
  report_dropped(report);
  const rb::TimeTransform transform = parse_transform(data_opts.transform);
  const rb::TruncatedDataset trunc = rb::apply_truncation(data, data_opts.tau, transform);

  rb::SamplerConfig config = sampler_opts.resolve();
  config.store_forests = !out_model.empty();
  std::fprintf(stderr, "fitting: n=%zu p=%zu trees=%zu iters=%zu censoring=%s\n", data.n,
               data.p, config.n_trees, config.n_iter,
               rb::censoring_choice_name(config.censoring));
  const rb::PosteriorDraws draws = rb::run_mcmc(config, trunc, data);
  std::fprintf(stderr,
               "done: eta=%.6g sigma_mu=%.6g mu_hat_b=%.6g capped-weight events=%llu\n",
               draws.eta, draws.sigma_mu, draws.mu_hat_b,
               static_cast<unsigned long long>(draws.capped_weight_events));

  if (!out_summary.empty()) {
    const std::vector<rb::IntervalSummary> summary =
        rb::posterior_summary(draws.f_draws, draws.total_kept(), data.n, level);
    rb::atomic_write_file(out_summary, summary_csv(summary));
  }
  if (!out_model.empty()) {
    rb::FitArtifact artifact;
    artifact.mu_hat_b = draws.mu_hat_b;
    artifact.tau = data_opts.tau;
    artifact.transform = transform;
    artifact.eta = draws.eta;
    artifact.sigma_mu = draws.sigma_mu;
    artifact.sigma_r2 = draws.sigma_r2;
    artifact.kappa = config.kappa;
    artifact.seed = config.seed;
    artifact.censoring = rb::censoring_choice_name(config.censoring);
    artifact.fixed_weights = config.fixed_weights;
    artifact.weight_cap = config.weight_cap;
    artifact.capped_weight_events = draws.capped_weight_events;
    artifact.covariate_names = data.covariate_names;
    artifact.tree_prior = config.tree_prior;
    artifact.grid = draws.grid;
    artifact.forests = draws.forests;
    rb::save_fit_artifact(artifact, out_model);
  }
  return 0;
}

int cmd_predict(const std::string& model_path, const std::string& data_path,
                const std::string& delimiter, double level, const std::string& out_path) {
  const rb::FitArtifact artifact = rb::load_fit_artifact(model_path);
  if (artifact.forests.empty()) throw rb::input_error("model file contains no forest draws");
  rb::CsvLoadReport report;
  const rb::CovariateMatrix x = rb::load_covariates_csv(
      data_path, artifact.covariate_names, delimiter.at(0), &report);
  report_dropped(report);
  const std::size_t p = artifact.covariate_names.size();
  const std::vector<double> draws = rb::predict_new(artifact.forests, artifact.grid,
                                                    x.values.data(), x.n, p, artifact.mu_hat_b);
  const std::vector<rb::IntervalSummary> summary =
      rb::posterior_summary(draws, artifact.forests.size(), x.n, level);
  rb::atomic_write_file(out_path, summary_csv(summary));
  return 0;
}

int cmd_importance(const std::string& model_path, const std::string& out_path) {
  const rb::FitArtifact artifact = rb::load_fit_artifact(model_path);
  if (artifact.forests.empty()) throw rb::input_error("model file contains no forest draws");
  const std::size_t p = artifact.covariate_names.size();
  std::vector<double> mean_counts(p, 0.0);
  for (const auto& forest : artifact.forests) {
    for (const auto& tree : forest.trees) tree.count_splits(p, mean_counts.data());
  }
  for (double& v : mean_counts) v /= static_cast<double>(artifact.forests.size());
  std::vector<std::size_t> order(p);
  for (std::size_t j = 0; j < p; ++j) order[j] = j;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return mean_counts[a] > mean_counts[b]; });
  std::ostringstream out;
  out << "variable,mean_split_count\n";
  for (std::size_t j : order) {
    out << artifact.covariate_names[j] << ',' << format_double(mean_counts[j]) << '\n';
  }
  rb::atomic_write_file(out_path, out.str());
  return 0;
}

int cmd_pdp(const std::string& model_path, const std::string& data_path,
            const std::string& delimiter, const std::string& var_name,
            std::size_t grid_points, const std::string& out_path) {
  const rb::FitArtifact artifact = rb::load_fit_artifact(model_path);
  if (artifact.forests.empty()) throw rb::input_error("model file contains no forest draws");
  rb::CsvLoadReport report;
  const rb::CovariateMatrix x = rb::load_covariates_csv(
      data_path, artifact.covariate_names, delimiter.at(0), &report);
  report_dropped(report);
  const std::size_t p = artifact.covariate_names.size();
  std::size_t var = p;
  for (std::size_t j = 0; j < p; ++j) {
    if (artifact.covariate_names[j] == var_name) {
      var = j;
      break;
    }
  }
  if (var == p) throw rb::input_error("unknown variable: " + var_name);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < x.n; ++i) {
    lo = std::min(lo, x.values[i * p + var]);
    hi = std::max(hi, x.values[i * p + var]);
  }
  if (!(hi > lo)) throw rb::input_error("variable is constant; no dependence grid");
  std::vector<double> grid(grid_points);
  for (std::size_t k = 0; k < grid_points; ++k) {
    grid[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(grid_points - 1);
  }
  rb::SurvivalDataset pseudo;  // partial dependence needs only covariate rows
  pseudo.n = x.n;
  pseudo.p = p;
  pseudo.covariates = x.values;
  const std::vector<double> rho = rb::partial_dependence(artifact.forests, artifact.grid,
                                                         pseudo, var, grid, artifact.mu_hat_b);
  std::ostringstream out;
  out << "u,partial_dependence\n";
  for (std::size_t k = 0; k < grid_points; ++k) {
    out << format_double(grid[k]) << ',' << format_double(rho[k]) << '\n';
  }
  rb::atomic_write_file(out_path, out.str());
  return 0;
}

int cmd_cv(const DataOptions& data_opts, const SamplerOptions& sampler_opts,
           const std::vector<double>& multipliers, std::size_t folds,
           const std::string& out_path) {
  rb::CsvLoadReport report;
  const rb::SurvivalDataset data =
      rb::load_csv(data_opts.path, data_opts.time_col, data_opts.event_col,
                   data_opts.delimiter.at(0), &report);
  report_dropped(report);
  rb::EtaSelection selection;
  if (!multipliers.empty()) selection.multipliers = multipliers;
  selection.folds = folds;
  const rb::SamplerConfig config = sampler_opts.resolve();
  const rb::EtaSelection chosen = rb::cross_validate_eta(
      selection, data, data_opts.tau, parse_transform(data_opts.transform), config);
  std::ostringstream out;
  out << "multiplier,sigma_r2,eta,score\n";
  for (std::size_t c = 0; c < chosen.multipliers.size(); ++c) {
    const double sigma = chosen.multipliers[c] * chosen.sigma_r2_tilde;
    out << format_double(chosen.multipliers[c]) << ',' << format_double(sigma) << ','
        << format_double(rb::default_eta(sigma, config.eta_paper_rule)) << ','
        << format_double(chosen.scores[c]) << '\n';
  }
  rb::atomic_write_file(out_path, out.str());
  std::printf("sigma_r2_tilde=%.10g chosen_sigma_r2=%.10g chosen_eta=%.10g\n",
              chosen.sigma_r2_tilde, chosen.chosen_sigma_r2, chosen.chosen_eta);
  return 0;
}

int cmd_simulate(rb::ScenarioConfig scenario, const SamplerOptions& sampler_opts,
                 bool use_cv_eta, std::size_t jobs, const std::string& out_reps,
                 const std::string& out_aggregate) {
  scenario.validate();
  const rb::SamplerConfig config = sampler_opts.resolve();
  config.validate();

  std::string method = use_cv_eta ? "rmst-bart" : "rmst-bart-default";
  if (config.censoring == rb::CensoringChoice::dependent) method += "-dep";
  if (config.fixed_weights || config.censoring == rb::CensoringChoice::fixed) method += "-fixedG";

  std::vector<rb::ReplicationResult> results(scenario.replications);
  const std::ptrdiff_t reps = static_cast<std::ptrdiff_t>(scenario.replications);
  const double t0 = omp_get_wtime();
#pragma omp parallel for schedule(dynamic) num_threads(static_cast<int>(jobs)) if (jobs > 1)
  for (std::ptrdiff_t r = 0; r < reps; ++r) {
    results[static_cast<std::size_t>(r)] =
        rb::run_replication(scenario, config, static_cast<std::size_t>(r), use_cv_eta);
#pragma omp critical
    std::fprintf(stderr, "replication %td/%td done (%.1fs elapsed)\n", r + 1, reps,
                 omp_get_wtime() - t0);
  }

  std::ostringstream per_rep;
  per_rep << "method,family,n,n_test,p,censoring,rate,tau,rep,censor_fraction,rmse,coverage\n";
  double rmse_sum = 0.0, rmse_sq = 0.0, cov_sum = 0.0, cens_sum = 0.0;
  for (std::size_t r = 0; r < scenario.replications; ++r) {
    const auto& res = results[r];
    per_rep << method << ',' << rb::family_name(scenario.family) << ',' << scenario.n << ','
            << scenario.n_test << ',' << scenario.p << ','
            << rb::censoring_scenario_name(scenario.censoring) << ','
            << format_double(scenario.rate) << ',' << format_double(scenario.tau) << ','
            << (r + 1) << ',' << format_double(res.censor_fraction) << ','
            << format_double(res.rmse) << ',' << format_double(res.coverage) << '\n';
    rmse_sum += res.rmse;
    rmse_sq += res.rmse * res.rmse;
    cov_sum += res.coverage;
    cens_sum += res.censor_fraction;
  }
  const double s = static_cast<double>(scenario.replications);
  const double mean_rmse = rmse_sum / s;
  const double sd_rmse =
      scenario.replications > 1 ? std::sqrt((rmse_sq - s * mean_rmse * mean_rmse) / (s - 1.0)) : 0.0;
  std::ostringstream agg;
  agg << "method,family,n,p,censoring,rate,tau,reps,mean_rmse,sd_rmse,mean_coverage,mean_censor_fraction\n";
  agg << method << ',' << rb::family_name(scenario.family) << ',' << scenario.n << ','
      << scenario.p << ',' << rb::censoring_scenario_name(scenario.censoring) << ','
      << format_double(scenario.rate) << ',' << format_double(scenario.tau) << ','
      << scenario.replications << ',' << format_double(mean_rmse) << ','
      << format_double(sd_rmse) << ',' << format_double(cov_sum / s) << ','
      << format_double(cens_sum / s) << '\n';

  if (!out_reps.empty()) rb::atomic_write_file(out_reps, per_rep.str());
  if (!out_aggregate.empty()) rb::atomic_write_file(out_aggregate, agg.str());
  std::fprintf(stderr, "simulate finished in %.1fs\n", omp_get_wtime() - t0);
  std::printf("%s", agg.str().c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RMST-BART: generalized-Bayes restricted mean survival time regression"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Flat key=value config file; command-line flags override it");

  DataOptions fit_data;
  SamplerOptions fit_sampler;
  double fit_level = 0.95;
  std::string fit_out_model, fit_out_summary = "summary.csv";
  auto* fit = app.add_subcommand("fit", "Fit RMST-BART to a survival CSV");
  add_data_options(fit, fit_data);
  add_sampler_options(fit, fit_sampler);
  fit->add_option("--level", fit_level, "Credible interval level")->capture_default_str();
  fit->add_option("--out-model", fit_out_model, "Model JSON output path (forest draws)");
  fit->add_option("--out-summary", fit_out_summary, "Per-observation summary CSV")
      ->capture_default_str();

  std::string predict_model, predict_data, predict_out = "predictions.csv";
  std::string predict_delim = ",";
  double predict_level = 0.95;
  auto* predict = app.add_subcommand("predict", "Predict RMST for new covariate rows");
  predict->add_option("--model", predict_model, "Model JSON from fit")->required();
  predict->add_option("--data", predict_data, "CSV containing the model's covariate columns")
      ->required();
  predict->add_option("--delimiter", predict_delim, "Field delimiter")->capture_default_str();
  predict->add_option("--level", predict_level, "Credible interval level")->capture_default_str();
  predict->add_option("--out", predict_out, "Output CSV")->capture_default_str();

  std::string imp_model, imp_out = "importance.csv";
  auto* importance = app.add_subcommand("importance", "Variable split counts, descending");
  importance->add_option("--model", imp_model, "Model JSON from fit")->required();
  importance->add_option("--out", imp_out, "Output CSV")->capture_default_str();

  std::string pdp_model, pdp_data, pdp_var, pdp_out = "pdp.csv";
  std::string pdp_delim = ",";
  std::size_t pdp_points = 20;
  auto* pdp = app.add_subcommand("pdp", "Partial dependence of the posterior-mean RMST");
  pdp->add_option("--model", pdp_model, "Model JSON from fit")->required();
  pdp->add_option("--data", pdp_data, "CSV with the model's covariate columns")->required();
  pdp->add_option("--var", pdp_var, "Variable name to sweep")->required();
  pdp->add_option("--grid-points", pdp_points, "Grid size over the observed range")
      ->capture_default_str();
  pdp->add_option("--delimiter", pdp_delim, "Field delimiter")->capture_default_str();
  pdp->add_option("--out", pdp_out, "Output CSV")->capture_default_str();

  DataOptions cv_data;
  SamplerOptions cv_sampler;
  std::vector<double> cv_multipliers;
  std::size_t cv_folds = 5;
  std::string cv_out = "cv.csv";
  auto* cv = app.add_subcommand("cv", "Cross-validate the loss tuning parameter eta");
  add_data_options(cv, cv_data);
  add_sampler_options(cv, cv_sampler);
  cv->add_option("--candidates", cv_multipliers,
                 "sigma_r2 multipliers (default 0.1 0.25 0.5 0.75 1 1.5)")
      ->delimiter(',');
  cv->add_option("--folds", cv_folds, "Cross-validation folds")->capture_default_str();
  cv->add_option("--out", cv_out, "Per-candidate score CSV")->capture_default_str();

  rb::ScenarioConfig scenario;
  SamplerOptions sim_sampler;
  std::string sim_family = "friedman";
  std::string sim_cens = "gamma";
  bool sim_cv = false;
  std::size_t sim_jobs = 1;
  double sim_tau = 0.0;
  std::string sim_out_reps = "replications.csv", sim_out_agg = "aggregate.csv";
  auto* simulate = app.add_subcommand("simulate", "Run the simulation study harness");
  simulate->add_option("--family", sim_family, "friedman or abs-linear")
      ->capture_default_str()
      ->check(CLI::IsMember({"friedman", "abs-linear"}));
  simulate->add_option("--n", scenario.n, "Training set size")->capture_default_str();
  simulate->add_option("--n-test", scenario.n_test, "Test set size")->capture_default_str();
  simulate->add_option("--p", scenario.p, "Number of covariates")->capture_default_str();
  simulate->add_option("--tau", sim_tau, "Restriction point (default 25 friedman, 5 abs-linear)");
  simulate->add_option("--cens-scenario", sim_cens,
                       "Generator censoring: gamma, informative, or none")
      ->capture_default_str()
      ->check(CLI::IsMember({"gamma", "informative", "none"}));
  simulate->add_option("--r", scenario.rate,
                       "Censoring parameter: gamma rate r, or shape r_D when informative")
      ->capture_default_str();
  simulate->add_option("--reps", scenario.replications, "Simulation replications")
      ->capture_default_str();
  simulate->add_option("--sim-seed", scenario.seed, "Scenario stream seed")->capture_default_str();
  simulate->add_flag("--use-cv-eta", sim_cv, "Select eta by 5-fold cross-validation per replication");
  simulate->add_option("--jobs", sim_jobs, "Parallel replications")->capture_default_str();
  simulate->add_option("--out-reps", sim_out_reps, "Per-replication CSV")->capture_default_str();
  simulate->add_option("--out-aggregate", sim_out_agg, "Aggregate CSV")->capture_default_str();
  add_sampler_options(simulate, sim_sampler);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 3;
  }

  try {
    if (fit->parsed()) {
      return cmd_fit(fit_data, fit_sampler, fit_level, fit_out_model, fit_out_summary);
    }
    if (predict->parsed()) {
      return cmd_predict(predict_model, predict_data, predict_delim, predict_level, predict_out);
    }
    if (importance->parsed()) return cmd_importance(imp_model, imp_out);
    if (pdp->parsed()) return cmd_pdp(pdp_model, pdp_data, pdp_delim, pdp_var, pdp_points, pdp_out);
    if (cv->parsed()) return cmd_cv(cv_data, cv_sampler, cv_multipliers, cv_folds, cv_out);
    if (simulate->parsed()) {
      scenario.family = rb::family_from_name(sim_family);
      scenario.censoring = rb::censoring_scenario_from_name(sim_cens);
      scenario.tau = sim_tau > 0.0 ? sim_tau : rb::ScenarioConfig::default_tau(scenario.family);
      return cmd_simulate(scenario, sim_sampler, sim_cv, sim_jobs, sim_out_reps, sim_out_agg);
    }
  } catch (const rb::input_error& e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 2;
  } catch (const rb::config_error& e) {
    std::fprintf(stderr, "configuration error: %s\n", e.what());
    return 3;
  } catch (const rb::numeric_error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 4;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 4;
  }
  return 0;
}

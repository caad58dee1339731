#include "rmstbart/survival_data.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "rmstbart/errors.hpp"

namespace rmstbart {

void SurvivalDataset::validate() const {
  if (n == 0) throw input_error("dataset is empty");
  if (times.size() != n || events.size() != n || covariates.size() != n * p) {
    throw input_error("dataset field lengths disagree");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!(times[i] >= 0.0) || !std::isfinite(times[i])) {
      throw input_error("row " + std::to_string(i + 1) + ": time must be a finite nonnegative number");
    }
    if (events[i] != 0 && events[i] != 1) {
      throw input_error("row " + std::to_string(i + 1) + ": event indicator must be 0 or 1");
    }
  }
}

double apply_transform(TimeTransform t, double x) {
  switch (t) {
    case TimeTransform::identity:
      return x;
    case TimeTransform::log_time:
      if (!(x > 0.0)) throw config_error("log transform requires strictly positive times");
      return std::log(x);
  }
  return x;
}

double invert_transform(TimeTransform t, double y) {
  switch (t) {
    case TimeTransform::identity:
      return y;
    case TimeTransform::log_time:
      return std::exp(y);
  }
  return y;
}

const char* transform_name(TimeTransform t) {
  return t == TimeTransform::identity ? "identity" : "log";
}

TimeTransform transform_from_name(const std::string& name) {
  if (name == "identity") return TimeTransform::identity;
  if (name == "log") return TimeTransform::log_time;
  throw config_error("unknown time transform: " + name);
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0;
  std::size_t b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

bool is_missing(const std::string& cell) {
  return cell.empty() || cell == "NA" || cell == "na" || cell == "NaN" ||
         cell == "nan" || cell == ".";
}

std::vector<std::string> split_line(const std::string& line, char delim) {
  std::vector<std::string> out;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, delim)) out.push_back(trim(field));
  if (!line.empty() && line.back() == delim) out.emplace_back();
  return out;
}

}  // namespace

SurvivalDataset load_csv(const std::string& path, const std::string& time_col,
                         const std::string& event_col, char delimiter,
                         CsvLoadReport* report) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw input_error("file is empty: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_line(line, delimiter);

  std::ptrdiff_t time_idx = -1;
  std::ptrdiff_t event_idx = -1;
  std::vector<std::size_t> covar_idx;
  std::vector<std::string> covar_names;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == time_col) {
      time_idx = static_cast<std::ptrdiff_t>(j);
    } else if (header[j] == event_col) {
      event_idx = static_cast<std::ptrdiff_t>(j);
    } else {
      covar_idx.push_back(j);
      covar_names.push_back(header[j]);
    }
  }
  if (time_idx < 0) throw input_error("missing time column: " + time_col);
  if (event_idx < 0) throw input_error("missing event column: " + event_col);

  SurvivalDataset data;
  data.p = covar_idx.size();
  data.covariate_names = covar_names;
  CsvLoadReport local;

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++row;
    const std::vector<std::string> cells = split_line(line, delimiter);
    if (cells.size() != header.size()) {
      throw input_error("row " + std::to_string(row) + ": expected " +
                        std::to_string(header.size()) + " fields, found " +
                        std::to_string(cells.size()));
    }
    bool missing = false;
    for (const auto& c : cells) {
      if (is_missing(c)) {
        missing = true;
        break;
      }
    }
    if (missing) {
      local.rows_dropped++;
      local.dropped_rows.push_back(row);
      continue;
    }
    auto parse = [&](std::size_t j) {
      const std::string& cell = cells[j];
      std::size_t pos = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != cell.size()) {
        throw input_error("row " + std::to_string(row) + ", column '" + header[j] +
                          "': non-numeric value '" + cell + "'");
      }
      return v;
    };
    const double t = parse(static_cast<std::size_t>(time_idx));
    const double e = parse(static_cast<std::size_t>(event_idx));
    if (e != 0.0 && e != 1.0) {
      throw input_error("row " + std::to_string(row) + ": event indicator must be 0 or 1, got " +
                        cells[static_cast<std::size_t>(event_idx)]);
    }
    data.times.push_back(t);
    data.events.push_back(static_cast<int>(e));
    for (std::size_t j : covar_idx) data.covariates.push_back(parse(j));
  }
  data.n = data.times.size();
  data.validate();
  if (report) *report = local;
  return data;
}

CovariateMatrix load_covariates_csv(const std::string& path,
                                    const std::vector<std::string>& names,
                                    char delimiter, CsvLoadReport* report) {
  std::ifstream in(path);
  if (!in) throw input_error("cannot open file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw input_error("file is empty: " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_line(line, delimiter);

  std::vector<std::ptrdiff_t> col_of(names.size(), -1);
  std::vector<std::string> unmatched;
  for (std::size_t k = 0; k < names.size(); ++k) {
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (header[j] == names[k]) {
        col_of[k] = static_cast<std::ptrdiff_t>(j);
        break;
      }
    }
    if (col_of[k] < 0) unmatched.push_back(names[k]);
  }
  if (!unmatched.empty()) {
    std::string msg = "covariate schema mismatch; missing columns:";
    for (const auto& u : unmatched) msg += " " + u;
    throw input_error(msg);
  }

  CovariateMatrix out;
  CsvLoadReport local;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++row;
    const std::vector<std::string> cells = split_line(line, delimiter);
    if (cells.size() != header.size()) {
      throw input_error("row " + std::to_string(row) + ": expected " +
                        std::to_string(header.size()) + " fields, found " +
                        std::to_string(cells.size()));
    }
    bool missing = false;
    for (std::size_t k = 0; k < names.size(); ++k) {
      if (is_missing(cells[static_cast<std::size_t>(col_of[k])])) {
        missing = true;
        break;
      }
    }
    if (missing) {
      local.rows_dropped++;
      local.dropped_rows.push_back(row);
      continue;
    }
    for (std::size_t k = 0; k < names.size(); ++k) {
      const std::string& cell = cells[static_cast<std::size_t>(col_of[k])];
      std::size_t pos = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != cell.size()) {
        throw input_error("row " + std::to_string(row) + ", column '" + names[k] +
                          "': non-numeric value '" + cell + "'");
      }
      out.values.push_back(v);
    }
    out.kept_rows.push_back(row);
  }
  out.n = out.kept_rows.size();
  if (report) *report = local;
  return out;
}

StepFunction::StepFunction(std::vector<double> jump_times, std::vector<double> values)
    : times_(std::move(jump_times)), values_(std::move(values)) {
  if (times_.size() != values_.size()) {
    throw config_error("step function: times and values lengths differ");
  }
}

double StepFunction::operator()(double t) const {
  // value on [times_[k], times_[k+1]); 1 before the first jump
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return 1.0;
  return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

double StepFunction::left_limit(double t) const {
  const auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.begin()) return 1.0;
  return values_[static_cast<std::size_t>(it - times_.begin()) - 1];
}

StepFunction km_censoring_survival(const SurvivalDataset& data) {
  data.validate();
  // censoring events per distinct time
  std::map<double, std::size_t> cens_counts;
  for (std::size_t i = 0; i < data.n; ++i) {
    if (data.events[i] == 0) cens_counts[data.times[i]]++;
  }
  std::vector<double> sorted_times = data.times;
  std::sort(sorted_times.begin(), sorted_times.end());
  std::vector<double> jump_times;
  std::vector<double> values;
  double surv = 1.0;
  for (const auto& [t, d] : cens_counts) {
    const auto it = std::lower_bound(sorted_times.begin(), sorted_times.end(), t);
    const std::size_t at_risk =
        data.n - static_cast<std::size_t>(it - sorted_times.begin());
    surv *= 1.0 - static_cast<double>(d) / static_cast<double>(at_risk);
    jump_times.push_back(t);
    values.push_back(surv);
  }
  return StepFunction(std::move(jump_times), std::move(values));
}

double ipcw_rmst_estimate(const std::vector<double>& u_tau,
                          const std::vector<int>& delta_tau,
                          const std::vector<double>& b_u_tau,
                          const StepFunction& censor_survival) {
  const std::size_t n = u_tau.size();
  if (delta_tau.size() != n || b_u_tau.size() != n) {
    throw config_error("ipcw_rmst_estimate: input lengths differ");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (delta_tau[k] == 0) continue;
    const double g = censor_survival.left_limit(u_tau[k]);
    if (!(g > 0.0)) {
      throw numeric_error("ipcw_rmst_estimate: zero censoring-survival weight at event " +
                          std::to_string(k + 1));
    }
    sum += b_u_tau[k] / g;
  }
  return sum / static_cast<double>(n);
}

TruncatedDataset apply_truncation(const SurvivalDataset& data, double tau,
                                  TimeTransform transform) {
  data.validate();
  if (transform == TimeTransform::log_time) {
    for (double t : data.times) {
      if (!(t > 0.0)) throw config_error("log transform requires strictly positive times");
    }
  }
  const double b0 = transform == TimeTransform::identity
                        ? 0.0
                        : -std::numeric_limits<double>::infinity();
  if (!(tau > b0)) throw config_error("tau must exceed b(0)");

  TruncatedDataset out;
  out.tau = tau;
  out.transform = transform;
  const double binv_tau = invert_transform(transform, tau);
  out.u_tau.resize(data.n);
  out.delta_tau.resize(data.n);
  std::vector<double> b_u_tau(data.n);
  for (std::size_t i = 0; i < data.n; ++i) {
    const double u = data.times[i];
    if (u >= binv_tau) {
      out.u_tau[i] = binv_tau;
      out.delta_tau[i] = 1;  // the tau-truncated outcome is known exactly
      b_u_tau[i] = tau;
    } else {
      out.u_tau[i] = u;
      out.delta_tau[i] = data.events[i];
      b_u_tau[i] = apply_transform(transform, u);
    }
  }
  const StepFunction g = km_censoring_survival(data);
  out.mu_hat_b = ipcw_rmst_estimate(out.u_tau, out.delta_tau, b_u_tau, g);
  if (transform == TimeTransform::identity &&
      (out.mu_hat_b < 0.0 || out.mu_hat_b > tau)) {
    // extreme IPCW weights can push the estimate outside [0, tau]
    std::fprintf(stderr, "note: IPCW restricted-mean estimate %.6g lies outside [0, %.6g]\n",
                 out.mu_hat_b, tau);
  }
  out.y_tau.resize(data.n);
  for (std::size_t i = 0; i < data.n; ++i) out.y_tau[i] = b_u_tau[i] - out.mu_hat_b;
  return out;
}

}  // namespace rmstbart

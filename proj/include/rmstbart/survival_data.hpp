#ifndef RMSTBART_SURVIVAL_DATA_HPP
#define RMSTBART_SURVIVAL_DATA_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace rmstbart {

/// Right-censored survival data: follow-up times U_i, event indicators
/// delta_i, and an n x p covariate matrix stored row-major.
struct SurvivalDataset {
  std::vector<double> times;
  std::vector<int> events;  // 1 = event, 0 = censored
  std::vector<double> covariates;
  std::size_t n = 0;
  std::size_t p = 0;
  std::vector<std::string> covariate_names;

  double x(std::size_t i, std::size_t j) const { return covariates[i * p + j]; }
  const double* row(std::size_t i) const { return covariates.data() + i * p; }

  void validate() const;  // throws input_error on violated invariants
};

/// Monotone transform b applied to the time axis before restriction.
enum class TimeTransform { identity, log_time };

double apply_transform(TimeTransform t, double x);
double invert_transform(TimeTransform t, double y);
const char* transform_name(TimeTransform t);
TimeTransform transform_from_name(const std::string& name);

/// Outcomes after restriction at tau (on the transformed scale) and
/// centering by the IPCW estimate mu_hat_b of the marginal restricted mean.
struct TruncatedDataset {
  std::vector<double> u_tau;    // min(U_i, b^{-1}(tau)), original time scale
  std::vector<int> delta_tau;   // 1 whenever b(U_i) >= tau, else delta_i
  std::vector<double> y_tau;    // b(u_tau_i) - mu_hat_b
  double mu_hat_b = 0.0;
  double tau = 0.0;
  TimeTransform transform = TimeTransform::identity;

  double b_inverse_tau() const { return invert_transform(transform, tau); }
  std::size_t size() const { return u_tau.size(); }
};

struct CsvLoadReport {
  std::size_t rows_dropped = 0;
  std::vector<std::size_t> dropped_rows;  // 1-based data row numbers
};

/// Reads a delimited file with a header row. The named time/event columns
/// become the outcome; every other column must be numeric and becomes a
/// covariate. Rows with missing cells (empty, NA, NaN, .) are dropped and
/// reported; any other non-numeric cell is an error naming the row.
SurvivalDataset load_csv(const std::string& path, const std::string& time_col,
                         const std::string& event_col, char delimiter = ',',
                         CsvLoadReport* report = nullptr);

/// Covariate rows from a delimited file, matched by name against a model's
/// covariate schema. Columns not in `names` are ignored; absent columns are
/// an error listing every unmatched name. Rows with missing cells in the
/// selected columns are dropped and reported.
struct CovariateMatrix {
  std::vector<double> values;  // row-major kept_rows x names.size()
  std::size_t n = 0;
  std::vector<std::size_t> kept_rows;  // 1-based data row numbers retained
};

CovariateMatrix load_covariates_csv(const std::string& path,
                                    const std::vector<std::string>& names,
                                    char delimiter = ',',
                                    CsvLoadReport* report = nullptr);

/// Right-continuous nonincreasing step function with value 1 at t = 0.
class StepFunction {
 public:
  StepFunction() = default;
  StepFunction(std::vector<double> jump_times, std::vector<double> values);

  double operator()(double t) const;
  /// Left limit: the value just before t.
  double left_limit(double t) const;

  const std::vector<double>& jump_times() const { return times_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::vector<double> times_;   // increasing jump locations
  std::vector<double> values_;  // value on [times_[k], times_[k+1])
};

/// Kaplan-Meier estimate of the censoring survival function G(t) = P(C > t):
/// the roles of events and censorings are swapped relative to the usual
/// survival KM, with all tied censorings at a time absorbed into one factor.
StepFunction km_censoring_survival(const SurvivalDataset& data);

/// IPCW estimate of the marginal restricted mean of b(U^tau):
///   (1/n) sum_k delta_tau_k * b(u_tau_k) / G(u_tau_k^-)
/// using the left limit of G at event times. Throws numeric_error when an
/// event carries zero weight.
double ipcw_rmst_estimate(const std::vector<double>& u_tau,
                          const std::vector<int>& delta_tau,
                          const std::vector<double>& b_u_tau,
                          const StepFunction& censor_survival);

/// Truncates at tau on the b scale, redefines the event indicator for
/// follow-up reaching the restriction point, and centers the outcomes.
TruncatedDataset apply_truncation(const SurvivalDataset& data, double tau,
                                  TimeTransform transform);

}  // namespace rmstbart

#endif

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <fstream>

#include "rmstbart/errors.hpp"
#include "rmstbart/rng.hpp"
#include "rmstbart/survival_data.hpp"

using namespace rmstbart;

namespace {

std::string write_temp(const std::string& name, const std::string& contents) {
  const std::string path = "./" + name;
  std::ofstream out(path);
  out << contents;
  return path;
}

SurvivalDataset make_data(std::vector<double> times, std::vector<int> events) {
  SurvivalDataset d;
  d.n = times.size();
  d.p = 1;
  d.times = std::move(times);
  d.events = std::move(events);
  d.covariates.assign(d.n, 0.5);
  d.covariate_names = {"x1"};
  return d;
}

}  // namespace

TEST_CASE("load_csv basic parsing") {
  const std::string path = write_temp(
      "toy_ok.csv", "time,event,age,bmi\n5.0,1,60,22.5\n3.5,0,70,30\n8,1,55,27\n");
  const SurvivalDataset d = load_csv(path, "time", "event");
  CHECK(d.n == 3);
  CHECK(d.p == 2);
  CHECK(d.covariate_names[0] == "age");
  CHECK(d.times[1] == doctest::Approx(3.5));
  CHECK(d.events[1] == 0);
  CHECK(d.x(2, 1) == doctest::Approx(27.0));
  std::remove(path.c_str());
}

TEST_CASE("load_csv rejects bad event values naming the row") {
  const std::string path =
      write_temp("toy_badevent.csv", "time,event,age\n5,1,60\n3,2,70\n");
  CHECK_THROWS_WITH_AS(load_csv(path, "time", "event"),
                       doctest::Contains("row 2"), input_error);
  std::remove(path.c_str());
}

TEST_CASE("load_csv drops missing-value rows with a report") {
  std::string body = "time,event,age\n";
  for (int i = 0; i < 9; ++i) body += "5,1,60\n";
  body += "4,1,NA\n";
  const std::string path = write_temp("toy_missing.csv", body);
  CsvLoadReport report;
  const SurvivalDataset d = load_csv(path, "time", "event", ',', &report);
  CHECK(d.n == 9);
  CHECK(report.rows_dropped == 1);
  CHECK(report.dropped_rows == std::vector<std::size_t>{10});
  std::remove(path.c_str());
}

TEST_CASE("load_csv errors") {
  CHECK_THROWS_AS(load_csv("./does_not_exist.csv", "time", "event"), input_error);
  const std::string path = write_temp("toy_nocol.csv", "time,status\n1,1\n");
  CHECK_THROWS_WITH_AS(load_csv(path, "time", "event"), doctest::Contains("event"),
                       input_error);
  const std::string path2 = write_temp("toy_nonnum.csv", "time,event,age\n1,1,abc\n");
  CHECK_THROWS_AS(load_csv(path2, "time", "event"), input_error);
  std::remove(path.c_str());
  std::remove(path2.c_str());
}

TEST_CASE("apply_truncation redefines events at tau") {
  SUBCASE("follow-up beyond tau becomes a known truncated outcome") {
    const auto trunc = apply_truncation(make_data({30, 10}, {0, 1}), 25.0,
                                        TimeTransform::identity);
    CHECK(trunc.u_tau == std::vector<double>{25, 10});
    CHECK(trunc.delta_tau == std::vector<int>{1, 1});
  }
  SUBCASE("tau beyond all data leaves everything unchanged") {
    const auto trunc = apply_truncation(make_data({5, 8}, {1, 1}), 100.0,
                                        TimeTransform::identity);
    CHECK(trunc.u_tau == std::vector<double>{5, 8});
    CHECK(trunc.delta_tau == std::vector<int>{1, 1});
  }
  SUBCASE("log transform rejects zero times") {
    CHECK_THROWS_AS(apply_truncation(make_data({0.0, 2.0}, {1, 1}), 1.0,
                                     TimeTransform::log_time),
                    config_error);
  }
  SUBCASE("centered outcomes satisfy the identity") {
    const auto trunc = apply_truncation(make_data({2, 4, 6, 9}, {1, 0, 1, 1}), 8.0,
                                        TimeTransform::identity);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(trunc.y_tau[i] == doctest::Approx(std::min(trunc.u_tau[i], 8.0) - trunc.mu_hat_b)
                                  .epsilon(1e-15));
      CHECK(std::min(trunc.u_tau[i], 8.0) <= 8.0);
    }
  }
}

TEST_CASE("censoring Kaplan-Meier") {
  SUBCASE("no censoring events gives G = 1") {
    const StepFunction g = km_censoring_survival(make_data({1, 2, 3}, {1, 1, 1}));
    CHECK(g(0.5) == 1.0);
    CHECK(g(10.0) == 1.0);
  }
  SUBCASE("hand computation") {
    const StepFunction g = km_censoring_survival(make_data({2, 4, 6}, {1, 0, 1}));
    CHECK(g(3.9) == 1.0);
    CHECK(g(4.0) == doctest::Approx(0.5));
    CHECK(g(100.0) == doctest::Approx(0.5));
    CHECK(g.left_limit(4.0) == 1.0);
  }
  SUBCASE("ties collapse into one factor, against a counting-process oracle") {
    Rng rng(31, 0);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 30;
      std::vector<double> times(n);
      std::vector<int> events(n);
      for (std::size_t i = 0; i < n; ++i) {
        times[i] = 1.0 + static_cast<double>(rng.uniform_index(8));  // forced ties
        events[i] = rng.uniform() < 0.5 ? 1 : 0;
      }
      const StepFunction g = km_censoring_survival(make_data(times, events));
      // oracle: product over distinct times of (1 - dN_c(t) / Y(t))
      std::vector<double> distinct = times;
      std::sort(distinct.begin(), distinct.end());
      distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
      double surv = 1.0;
      for (double t : distinct) {
        std::size_t at_risk = 0, cens = 0;
        for (std::size_t i = 0; i < n; ++i) {
          if (times[i] >= t) ++at_risk;
          if (times[i] == t && events[i] == 0) ++cens;
        }
        surv *= 1.0 - static_cast<double>(cens) / static_cast<double>(at_risk);
        CHECK(g(t) == doctest::Approx(surv).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("ipcw restricted-mean estimate") {
  SUBCASE("no censoring reduces to a sample mean of truncated outcomes") {
    const auto trunc =
        apply_truncation(make_data({1, 3, 5}, {1, 1, 1}), 4.0, TimeTransform::identity);
    CHECK(trunc.mu_hat_b == doctest::Approx((1.0 + 3.0 + 4.0) / 3.0).epsilon(1e-15));
  }
  SUBCASE("single observation") {
    StepFunction g({}, {});
    CHECK(ipcw_rmst_estimate({2.0}, {1}, {2.0}, g) == doctest::Approx(2.0));
  }
  SUBCASE("weighted hand example at tau 10") {
    const auto trunc =
        apply_truncation(make_data({2, 4, 6}, {1, 0, 1}), 10.0, TimeTransform::identity);
    CHECK(trunc.mu_hat_b == doctest::Approx(14.0 / 3.0).epsilon(1e-14));
  }
  SUBCASE("zero weight at an event time raises") {
    // all later observations censored, so G hits zero before the last event
    StepFunction g({1.0}, {0.0});
    CHECK_THROWS_AS(ipcw_rmst_estimate({2.0}, {1}, {2.0}, g), numeric_error);
  }
  SUBCASE("row permutation invariance") {
    std::vector<double> times = {2, 7, 4, 9, 1, 6, 3};
    std::vector<int> events = {1, 0, 1, 1, 0, 1, 1};
    const auto base = apply_truncation(make_data(times, events), 8.0, TimeTransform::identity);
    Rng rng(77, 0);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::size_t> perm(times.size());
      for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
      for (std::size_t i = perm.size(); i > 1; --i) {
        std::swap(perm[i - 1], perm[rng.uniform_index(i)]);
      }
      std::vector<double> pt(times.size());
      std::vector<int> pe(times.size());
      for (std::size_t i = 0; i < perm.size(); ++i) {
        pt[i] = times[perm[i]];
        pe[i] = events[perm[i]];
      }
      const auto shuffled = apply_truncation(make_data(pt, pe), 8.0, TimeTransform::identity);
      CHECK(shuffled.mu_hat_b == doctest::Approx(base.mu_hat_b).epsilon(1e-13));
    }
  }
}

TEST_CASE("covariate matrix loader") {
  const std::string path = write_temp(
      "toy_cov.csv", "time,event,age,bmi\n5,1,60,22\n3,0,70,NA\n8,1,55,27\n");
  CsvLoadReport report;
  const CovariateMatrix m = load_covariates_csv(path, {"bmi", "age"}, ',', &report);
  CHECK(m.n == 2);
  CHECK(report.rows_dropped == 1);
  CHECK(m.values == std::vector<double>{22, 60, 27, 55});
  CHECK_THROWS_WITH_AS(load_covariates_csv(path, {"age", "height"}),
                       doctest::Contains("height"), input_error);
  std::remove(path.c_str());
}

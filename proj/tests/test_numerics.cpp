#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "rmstbart/errors.hpp"
#include "rmstbart/rng.hpp"
#include "rmstbart/special.hpp"
#include "test_util.hpp"

using namespace rmstbart;

TEST_CASE("identical (seed, stream) reproduces the draw sequence") {
  Rng a(42, 7);
  Rng b(42, 7);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
  Rng c(42, 8);
  Rng d(42, 7);
  bool differs = false;
  for (int i = 0; i < 64 && !differs; ++i) differs = c.next_u64() != d.next_u64();
  CHECK(differs);
}

TEST_CASE("derived streams are reproducible and distinct") {
  Rng root(9, 0);
  Rng a = root.derive(1, 3);
  Rng b = root.derive(1, 3);
  Rng c = root.derive(1, 4);
  Rng d = root.derive(2, 3);
  CHECK(a.next_u64() == b.next_u64());
  CHECK(a.next_u64() != c.next_u64());
  CHECK(c.next_u64() != d.next_u64());
}

TEST_CASE("gamma sampler moments") {
  const std::size_t n = 1000000;
  SUBCASE("unit exponential mean") {
    Rng rng(1, 0);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += sample_gamma(1.0, 1.0, rng);
    CHECK(s / n == doctest::Approx(1.0).epsilon(0.005));
  }
  SUBCASE("Gamma(3.2, 0.2) mean 16") {
    Rng rng(2, 0);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += sample_gamma(3.2, 0.2, rng);
    CHECK(s / n == doctest::Approx(16.0).epsilon(0.05 / 16.0));
  }
  SUBCASE("Gamma(2.5, 1.5) variance shape/rate^2") {
    Rng rng(3, 0);
    std::vector<double> draws(n);
    for (auto& v : draws) v = sample_gamma(2.5, 1.5, rng);
    CHECK(test_util::variance(draws) == doctest::Approx(2.5 / 2.25).epsilon(0.01));
  }
  SUBCASE("rejects bad parameters") {
    Rng rng(4, 0);
    CHECK_THROWS_AS(sample_gamma(0.0, 1.0, rng), config_error);
    CHECK_THROWS_AS(sample_gamma(1.0, -1.0, rng), config_error);
  }
}

TEST_CASE("beta sampler moments") {
  const std::size_t n = 1000000;
  SUBCASE("uniform mean") {
    Rng rng(5, 0);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += sample_beta(1.0, 1.0, rng);
    CHECK(s / n == doctest::Approx(0.5).epsilon(0.01));
  }
  SUBCASE("Beta(5,1) mean 5/6") {
    Rng rng(6, 0);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += sample_beta(5.0, 1.0, rng);
    CHECK(s / n == doctest::Approx(5.0 / 6.0).epsilon(0.005 / (5.0 / 6.0)));
  }
  SUBCASE("Beta(3,2) variance") {
    Rng rng(7, 0);
    std::vector<double> draws(n);
    for (auto& v : draws) v = sample_beta(3.0, 2.0, rng);
    CHECK(test_util::variance(draws) == doctest::Approx(0.04).epsilon(0.05));
  }
  SUBCASE("rejects bad parameters") {
    Rng rng(8, 0);
    CHECK_THROWS_AS(sample_beta(0.0, 1.0, rng), config_error);
  }
}

TEST_CASE("truncated normal sampler") {
  const std::size_t n = 400000;
  SUBCASE("negligible truncation recovers the mean") {
    Rng rng(9, 0);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += sample_trunc_normal(0.0, 1.0, -10.0, rng);
    CHECK(s / n == doctest::Approx(0.0).epsilon(1.0));
    CHECK(std::fabs(s / n) < 0.01);
  }
  SUBCASE("half-normal mean sqrt(2/pi)") {
    Rng rng(10, 0);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += sample_trunc_normal(0.0, 1.0, 0.0, rng);
    CHECK(s / n == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(0.01));
  }
  SUBCASE("draws always exceed the bound, including far tails") {
    Rng rng(11, 0);
    for (double lower : {-3.0, 0.0, 2.5, 6.0, 12.0}) {
      for (int i = 0; i < 20000; ++i) {
        CHECK(sample_trunc_normal(0.0, 1.0, lower, rng) > lower);
      }
    }
  }
  SUBCASE("rejects non-finite bound") {
    Rng rng(12, 0);
    CHECK_THROWS_AS(sample_trunc_normal(0.0, 1.0, std::numeric_limits<double>::infinity(), rng),
                    config_error);
  }
}

TEST_CASE("kolmogorov-smirnov against target CDFs") {
  const std::size_t n = 100000;
  const double crit = test_util::ks_critical_01(n);

  auto run_gamma = [&](double shape, double rate, std::uint64_t seed) {
    Rng rng(seed, 0);
    std::vector<double> draws(n);
    for (auto& v : draws) v = sample_gamma(shape, rate, rng);
    return test_util::ks_statistic(draws, [&](double x) { return gamma_cdf(x, shape, rate); });
  };
  CHECK(run_gamma(1.0, 1.0, 21) < crit);
  CHECK(run_gamma(3.2, 0.2, 22) < crit);
  CHECK(run_gamma(2.5, 1.5, 23) < crit);

  // beta CDF via quadrature of the density (test-side oracle)
  auto beta_cdf = [](double x, double a, double b) {
    const double logc = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
    return test_util::integrate(
        [&](double t) {
          if (t <= 0.0 || t >= 1.0) return 0.0;
          return std::exp(logc + (a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t));
        },
        0.0, std::min(std::max(x, 0.0), 1.0), 1e-11);
  };
  auto run_beta = [&](double a, double b, std::uint64_t seed) {
    Rng rng(seed, 0);
    std::vector<double> draws(n);
    for (auto& v : draws) v = sample_beta(a, b, rng);
    return test_util::ks_statistic(draws, [&](double x) { return beta_cdf(x, a, b); });
  };
  CHECK(run_beta(1.0, 1.0, 24) < crit);
  CHECK(run_beta(5.0, 1.0, 25) < crit);
  CHECK(run_beta(3.0, 2.0, 26) < crit);

  auto run_trunc = [&](double lower, std::uint64_t seed) {
    Rng rng(seed, 0);
    std::vector<double> draws(n);
    for (auto& v : draws) v = sample_trunc_normal(0.0, 1.0, lower, rng);
    const double tail = 1.0 - normal_cdf(lower);
    return test_util::ks_statistic(
        draws, [&](double x) { return (normal_cdf(x) - normal_cdf(lower)) / tail; });
  };
  CHECK(run_trunc(-10.0, 27) < crit);
  CHECK(run_trunc(0.0, 28) < crit);
  CHECK(run_trunc(3.0, 29) < crit);
}

TEST_CASE("normal cdf") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(normal_cdf(1.959964) == doctest::Approx(0.975).epsilon(1e-6));
  for (double x : {0.5, 1.0, 3.0}) {
    CHECK(normal_cdf(-x) + normal_cdf(x) == doctest::Approx(1.0).epsilon(1e-13));
  }
  // quantile inverts the cdf
  for (double p : {0.001, 0.025, 0.3, 0.5, 0.9, 0.999}) {
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-9));
  }
}

TEST_CASE("gamma cdf") {
  CHECK(gamma_cdf(1.0, 1.0, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
  CHECK(gamma_cdf(0.0, 3.0, 0.5) == 0.0);
  CHECK(gamma_cdf(-2.0, 3.0, 0.5) == 0.0);

  SUBCASE("matches quadrature of the density to 1e-10") {
    const double shape = 3.2;
    const double rate = 0.2;
    auto density = [&](double t) {
      if (t <= 0.0) return 0.0;
      return std::exp(shape * std::log(rate) + (shape - 1.0) * std::log(t) - rate * t -
                      std::lgamma(shape));
    };
    for (double x : {1.0, 5.0, 16.0, 25.0, 60.0}) {
      const double oracle = test_util::integrate(density, 0.0, x, 1e-13);
      CHECK(gamma_cdf(x, shape, rate) == doctest::Approx(oracle).epsilon(1e-10));
    }
  }

  SUBCASE("nondecreasing into [0,1]") {
    double prev = 0.0;
    for (int k = 0; k <= 400; ++k) {
      const double x = 0.25 * k;
      const double v = gamma_cdf(x, 2.5, 1.5);
      CHECK(v >= prev);
      CHECK(v <= 1.0);
      prev = v;
    }
  }
}

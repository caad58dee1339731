#include "rmstbart/rng.hpp"

#include <cmath>

#include "rmstbart/errors.hpp"
#include "rmstbart/special.hpp"

namespace rmstbart {

namespace {

// splitmix64, used to whiten user-facing seed/stream values before they
// enter the PCG state.
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

Rng::Rng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {
  const std::uint64_t initseq = mix64(stream);
  state_ = 0;
  inc_ = (initseq << 1u) | 1u;
  next_u32();
  state_ += mix64(seed);
  next_u32();
}

std::uint32_t Rng::next_u32() {
  const std::uint64_t oldstate = state_;
  state_ = oldstate * 6364136223846793005ULL + inc_;
  const std::uint32_t xorshifted =
      static_cast<std::uint32_t>(((oldstate >> 18u) ^ oldstate) >> 27u);
  const std::uint32_t rot = static_cast<std::uint32_t>(oldstate >> 59u);
  return (xorshifted >> rot) | (xorshifted << ((-rot) & 31u));
}

std::uint64_t Rng::next_u64() {
  const std::uint64_t hi = next_u32();
  const std::uint64_t lo = next_u32();
  return (hi << 32) | lo;
}

double Rng::uniform() {
  const std::uint64_t a = next_u32() >> 5;   // 27 bits
  const std::uint64_t b = next_u32() >> 6;   // 26 bits
  return (static_cast<double>(a) * 67108864.0 + static_cast<double>(b)) *
         (1.0 / 9007199254740992.0);
}

double Rng::uniform_pos() {
  double u;
  do {
    u = uniform();
  } while (u <= 0.0);
  return u;
}

double Rng::normal() { return normal_quantile(uniform_pos()); }

double Rng::exponential() { return -std::log(uniform_pos()); }

std::uint64_t Rng::uniform_index(std::uint64_t n) {
  // rejection to avoid modulo bias
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t v;
  do {
    v = next_u64();
  } while (v >= limit);
  return v % n;
}

Rng Rng::derive(std::uint64_t tag, std::uint64_t index) const {
  const std::uint64_t child = mix64(stream_ ^ mix64(tag * 0x100000001b3ULL + index));
  return Rng(seed_, child);
}

double sample_gamma(double shape, double rate, Rng& rng) {
  if (!(shape > 0.0) || !(rate > 0.0)) {
    throw config_error("sample_gamma: shape and rate must be positive");
  }
  if (shape < 1.0) {
    // boost: G(a) = G(a+1) * U^{1/a}
    const double g = sample_gamma(shape + 1.0, 1.0, rng);
    const double u = rng.uniform_pos();
    return g * std::pow(u, 1.0 / shape) / rate;
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x;
    double v;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform_pos();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v / rate;
    if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v / rate;
  }
}

double sample_beta(double a, double b, Rng& rng) {
  if (!(a > 0.0) || !(b > 0.0)) {
    throw config_error("sample_beta: parameters must be positive");
  }
  const double x = sample_gamma(a, 1.0, rng);
  const double y = sample_gamma(b, 1.0, rng);
  return x / (x + y);
}

double sample_trunc_normal(double mean, double sd, double lower, Rng& rng) {
  if (!(sd > 0.0)) {
    throw config_error("sample_trunc_normal: sd must be positive");
  }
  if (!std::isfinite(lower)) {
    throw config_error("sample_trunc_normal: lower bound must be finite");
  }
  const double alpha = (lower - mean) / sd;
  if (alpha <= 2.0) {
    // acceptance >= P(Z > 2) when sampling untruncated normals
    for (;;) {
      const double z = rng.normal();
      if (z > alpha) return mean + sd * z;
    }
  }
  // Robert (1995): shifted exponential proposal with optimal rate.
  const double lambda = 0.5 * (alpha + std::sqrt(alpha * alpha + 4.0));
  for (;;) {
    const double z = alpha + rng.exponential() / lambda;
    const double diff = z - lambda;
    if (std::log(rng.uniform_pos()) <= -0.5 * diff * diff) return mean + sd * z;
  }
}

}  // namespace rmstbart

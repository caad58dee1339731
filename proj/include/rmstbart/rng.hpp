#ifndef RMSTBART_RNG_HPP
#define RMSTBART_RNG_HPP

#include <cstdint>

namespace rmstbart {

/// Seedable random generator with independent substreams (PCG32).
///
/// A generator is identified by a (seed, stream) pair: the same pair always
/// reproduces the same draw sequence, and distinct stream ids select distinct
/// PCG increment sequences, giving statistically independent streams. Workers
/// (chains, folds, replications) each own a derived stream; generators are
/// never shared across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on [0,1) with 53 random bits.
  double uniform();
  /// Uniform on (0,1); safe as a log() argument.
  double uniform_pos();
  /// Standard normal via the AS241 quantile applied to uniform_pos().
  double normal();
  /// Exponential with unit rate.
  double exponential();
  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);

  std::uint64_t seed_value() const { return seed_; }
  std::uint64_t stream_value() const { return stream_; }

  /// Independent generator for a named child task. Children of distinct
  /// (tag, index) pairs, and of distinct parent streams, do not collide.
  Rng derive(std::uint64_t tag, std::uint64_t index) const;

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
  std::uint64_t seed_;
  std::uint64_t stream_;
};

/// Gamma(shape, rate) draw with mean shape/rate. Marsaglia-Tsang.
double sample_gamma(double shape, double rate, Rng& rng);

/// Beta(a, b) draw.
double sample_beta(double a, double b, Rng& rng);

/// Normal(mean, sd^2) conditioned on the result being > lower.
/// Uses a shifted-exponential proposal far in the tail, plain rejection
/// otherwise.
double sample_trunc_normal(double mean, double sd, double lower, Rng& rng);

}  // namespace rmstbart

#endif

#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>

namespace osrl {

/// Seedable, splittable generator. Each (seed, stream) pair yields an independent
/// mt19937_64 stream; the draws below avoid std distributions so that traces are
/// reproducible across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  Rng split(std::uint64_t stream) const;

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream() const noexcept { return stream_; }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform index in [0, n).
  std::size_t index(std::size_t n);
  /// Draw from a discrete distribution given by (non-negative) weights.
  std::size_t categorical(std::span<const double> weights);
  /// Standard exponential, used for flat Dirichlet draws.
  double exponential();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace osrl

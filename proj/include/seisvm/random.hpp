#pragma once

#include <cstdint>

namespace seisvm {

/**
 * xoshiro256** seeded through splitmix64.
 *
 * Spelled out here rather than taken from <random> so that sequences (and
 * therefore shuffles and synthetic records) are identical on every platform.
 */
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer on [0, n), unbiased (rejection sampling). n > 0.
  std::uint64_t below(std::uint64_t n);
  /// Standard normal via Box-Muller; the second variate is cached.
  double normal();

 private:
  std::uint64_t s_[4];
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace seisvm

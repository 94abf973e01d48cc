#pragma once

#include <cstdint>

namespace grasplab {

/// Deterministic PRNG (xoshiro256++ seeded through splitmix64).
///
/// The generator and all derived distributions are implemented here rather
/// than through <random> so that a given seed produces the same stream on
/// every standard library and platform. Streams are value types; fork()
/// derives an independent child stream from the parent seed and a salt.
class RandomStream {
 public:
  explicit RandomStream(uint64_t seed = 0) { reseed(seed); }

  void reseed(uint64_t seed);
  uint64_t seed() const { return seed_; }

  uint64_t next_u64();

  /// Uniform double in [0, 1).
  double uniform();
  /// Uniform double in [a, b).
  double uniform(double a, double b);
  /// Uniform integer in [0, n); n must be positive.
  int uniform_int(int n);
  /// Standard normal via Box-Muller (one spare cached).
  double normal();

  /// Independent stream derived from (seed, salt). Forking with distinct
  /// salts gives uncorrelated streams regardless of how much of the parent
  /// has been consumed.
  RandomStream fork(uint64_t salt) const;

 private:
  uint64_t state_[4];
  uint64_t seed_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Stable 64-bit mix of two values, used to derive seeds for sub-streams.
uint64_t mix_seed(uint64_t a, uint64_t b);

}  // namespace grasplab

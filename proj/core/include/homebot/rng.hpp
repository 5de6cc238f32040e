#pragma once

#include <cstdint>
#include <random>

namespace homebot {

// Seeded random source. The engine is std::mt19937_64; the distributions are
// written out here because libstdc++ and libc++ disagree on the sequences
// produced by <random> distributions, and event logs must be byte-identical.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [lo, hi], inclusive.
  int uniform_int(int lo, int hi);

  double normal(double mean = 0.0, double stddev = 1.0);

  bool bernoulli(double p) { return uniform() < p; }

  /// Independent sub-stream derived from this stream's seed and a label.
  [[nodiscard]] Rng fork(std::uint64_t stream) const;

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finalizer; used to derive stream seeds.
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);

}  // namespace homebot

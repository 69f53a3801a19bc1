#pragma once

#include <cstdint>
#include <limits>
#include <string_view>
#include <vector>

namespace causirl {

/// Portable xoshiro256** generator seeded through SplitMix64.
///
/// Every draw (integers, uniforms, Box-Muller normals) is defined here rather
/// than through <random> distributions, whose outputs differ between standard
/// library implementations. A given seed yields the same stream on every
/// platform.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed = 0);

  /// Independent stream for (seed, tag, index). Used to give every purpose
  /// (initialization, batching, mixture splits, ...) its own stream.
  static Rng substream(std::uint64_t seed, std::string_view tag, std::uint64_t index = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next(); }

  std::uint64_t next();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform integer on {0, ..., bound - 1}; bound must be positive.
  std::uint64_t uniform_int(std::uint64_t bound);
  /// Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  /// Fisher-Yates shuffle of `values` driven by this generator.
  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      std::size_t j = uniform_int(i);
      std::swap(values[i - 1], values[j]);
    }
  }

  /// Random permutation of {0, ..., n - 1}.
  std::vector<std::size_t> permutation(std::size_t n);

 private:
  std::uint64_t s_[4];
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

/// SplitMix64 finalizer; exposed for seed derivation.
std::uint64_t mix64(std::uint64_t x);

}  // namespace causirl

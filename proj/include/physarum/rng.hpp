#pragma once

#include <cstdint>

namespace physarum {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Counter-based generator: every draw is a pure function of its key, so
/// the order in which callers ask for numbers never changes what they get.
class CounterRng {
 public:
  constexpr explicit CounterRng(std::uint64_t seed = 0) : seed_(seed) {}

  constexpr std::uint64_t seed() const { return seed_; }

  constexpr std::uint64_t bits(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const {
    std::uint64_t h = mix64(seed_ ^ 0x6A09E667F3BCC908ULL);
    h = mix64(h ^ a);
    h = mix64(h ^ (b + 0x3C6EF372FE94F82BULL));
    h = mix64(h ^ (c + 0xA54FF53A5F1D36F1ULL));
    return h;
  }

  /// Uniform in [0, 1).
  constexpr double uniform01(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const {
    return static_cast<double>(bits(a, b, c) >> 11) * 0x1.0p-53;
  }

  /// Uniform in [-1, 1).
  constexpr double symmetric(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0) const {
    return 2.0 * uniform01(a, b, c) - 1.0;
  }

 private:
  std::uint64_t seed_;
};

/// Sequential stream built on CounterRng; used for scene and maze generation.
class SeqRng {
 public:
  explicit SeqRng(std::uint64_t seed, std::uint64_t stream = 0) : rng_(seed), stream_(stream) {}

  std::uint64_t next() { return rng_.bits(stream_, counter_++); }
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
  /// Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) {
    // Rejection keeps the draw unbiased and platform independent.
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    std::uint64_t v = next();
    while (v >= limit) v = next();
    return v % n;
  }

 private:
  CounterRng rng_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace physarum

#pragma once

#include <cstdint>
#include <random>

namespace fcrm::rng {

/// SplitMix64 step; the standard 64-bit finalizer-based mixer.
inline uint64_t splitmix64(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

inline uint64_t mix_seed(uint64_t seed, uint64_t stream) {
  uint64_t state = seed ^ (0x9E3779B97F4A7C15ULL * (stream + 1));
  uint64_t out = splitmix64(state);
  out ^= splitmix64(state);
  return out;
}

/// One deterministic variate stream: mt19937_64 (bit-exact per the standard)
/// seeded from (seed, stream) via SplitMix64, with hand-rolled transforms so
/// results do not depend on the standard library's distribution choices.
class Stream {
 public:
  Stream(uint64_t seed, uint64_t stream) : engine_(mix_seed(seed, stream)) {}

  uint64_t next_u64() { return engine_(); }

  /// Uniform on (0, 1), 53-bit resolution, never exactly 0 or 1.
  double uniform01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; pairs are cached.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u1 = uniform01();
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * M_PI * u2;
    cached_ = radius * std::sin(angle);
    have_cached_ = true;
    return radius * std::cos(angle);
  }

  double exponential(double rate) { return -std::log(uniform01()) / rate; }

  /// Poisson variate: Knuth's product method below mean 10, Hormann's
  /// transformed rejection with squeeze (PTRS) above.
  long poisson(double mean);

 private:
  std::mt19937_64 engine_;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace fcrm::rng

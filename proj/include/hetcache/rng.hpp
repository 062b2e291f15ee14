#pragma once

#include <cstdint>

namespace hetcache {

/// SplitMix64 stream. Portable and fully specified, so clouds are bitwise
/// reproducible across compilers and standard libraries (unlike std::*_distribution).
///
/// Each sample point owns an independent substream keyed by (seed, index),
/// which makes generation order-independent.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t state) : state_(state) {}

  static constexpr SplitMix64 substream(std::uint64_t seed, std::uint64_t index) {
    // Two rounds of mixing decorrelate neighbouring indices.
    SplitMix64 keyed(seed ^ mix(index + 0x632BE59BD9B4E019ULL));
    return SplitMix64(keyed.next());
  }

  constexpr std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform double in [0, 1) with 53 random bits.
  constexpr double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  constexpr double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  static constexpr std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
};

}  // namespace hetcache

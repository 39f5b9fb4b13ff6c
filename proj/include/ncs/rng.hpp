#pragma once

#include <cstdint>

namespace ncs {

/// Deterministic, splittable pseudo-random stream (splitmix64).
///
/// The same seed and call sequence produce the same bits on every platform,
/// which is what makes benchmark tables and coreset builds reproducible.
/// Substreams derived via child() are statistically independent, so
/// per-point or per-task randomness does not depend on iteration order.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : state_(seed) {}

  /// Next raw 64 random bits.
  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix(state_);
  }

  /// Uniform double in [0, 1).
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform double in (0, 1] (safe as a log() argument).
  double next_double_open() { return 1.0 - next_double(); }

  /// Uniform integer in [0, bound). Debiased via rejection.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  /// Derive an independent substream indexed by `stream`.
  /// Does not advance this generator, so derivation commutes with use.
  SeededRng child(std::uint64_t stream) const {
    return SeededRng(mix(state_ ^ mix(stream + 0x632BE59BD9B4E019ULL)));
  }

  std::uint64_t state() const { return state_; }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ULL;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBULL;
    x ^= x >> 31;
    return x;
  }

  std::uint64_t state_;
};

}  // namespace ncs

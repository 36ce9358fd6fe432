#pragma once

#include <cstdint>

namespace fl {

/// Counter-based splittable generator. Every experiment draws all of its
/// randomness from one 64-bit seed through this type; values depend only on
/// (seed, stream path, counter), so shards can be evaluated in any order.
class SplitRng {
 public:
  explicit SplitRng(std::uint64_t seed) : key_(mix(seed ^ 0x243f6a8885a308d3ull)) {}

  /// Child generator for an independent stream (sample index, shard id, ...).
  SplitRng split(std::uint64_t stream) const {
    SplitRng child(*this);
    child.key_ = mix(key_ ^ (0x452821e638d01377ull + stream * 0x9e3779b97f4a7c15ull));
    child.counter_ = 0;
    return child;
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ull); }

  /// Uniform in [0, 1).
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  std::uint64_t next_below(std::uint64_t bound) { return next_u64() % bound; }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ull;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebull;
    x ^= x >> 31;
    return x;
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace fl

#pragma once

#include <cstdint>

#include "ctd/field.hpp"

namespace ctd {

/// SplitMix64 (Steele, Lea, Flood 2014): 64-bit state, increment
/// 0x9e3779b97f4a7c15, output mixed with the MurmurHash3-style finalizer.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t state_;
};

/// Per-node draws lo + (hi - lo) * uniform() in global node order.
/// lo == hi gives a constant field; lo > hi is a configuration error.
FullField seeded_initial_condition(const Grid& grid, std::uint64_t seed, double lo, double hi);

}  // namespace ctd

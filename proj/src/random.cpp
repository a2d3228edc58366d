#include "ctd/random.hpp"

#include "ctd/errors.hpp"

namespace ctd {

FullField seeded_initial_condition(const Grid& grid, std::uint64_t seed, double lo, double hi) {
  if (lo > hi) throw ConfigError("initial_condition: lower bound exceeds upper bound");
  FullField field(grid, lo);
  if (lo == hi) return field;
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < field.size(); ++i) field[i] = lo + (hi - lo) * rng.uniform();
  return field;
}

}  // namespace ctd

#ifndef MCOMPTON_RNG_HPP
#define MCOMPTON_RNG_HPP

#include <cstdint>

namespace mcompton {

/**
 * Philox4x32-10 counter-based generator (constants from Salmon et al.,
 * "Parallel random numbers: as easy as 1, 2, 3").
 *
 * The 64-bit seed is the key; the 128-bit counter is (sample index, slot).
 * Every global sample index therefore addresses its own random block, so a
 * range of indices can be split into shards arbitrarily and each shard
 * regenerates exactly the numbers it would have produced in a single
 * sequential run.  That property is what makes the Monte Carlo totals
 * independent of the shard/thread decomposition.
 */
class Philox {
 public:
  explicit Philox(std::uint64_t seed) : key0_(static_cast<std::uint32_t>(seed)),
                                        key1_(static_cast<std::uint32_t>(seed >> 32)) {}

  // Fill out[0..n) with uniforms in [0,1) for one global sample index.
  // n is capped by the 32-bit slot counter; anything below 2^33 works.
  void uniforms(std::uint64_t index, int n, double* out) const;

 private:
  std::uint32_t key0_, key1_;
};

}  // namespace mcompton

#endif

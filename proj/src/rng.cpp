#include "mcompton/rng.hpp"

namespace mcompton {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

struct Counter {
  std::uint32_t v[4];
};

inline Counter philox_round(Counter c, std::uint32_t k0, std::uint32_t k1) {
  std::uint32_t hi0, lo0, hi1, lo1;
  mulhilo(kPhiloxM0, c.v[0], hi0, lo0);
  mulhilo(kPhiloxM1, c.v[2], hi1, lo1);
  return Counter{{hi1 ^ c.v[1] ^ k0, lo1, hi0 ^ c.v[3] ^ k1, lo0}};
}

Counter philox10(Counter c, std::uint32_t k0, std::uint32_t k1) {
  for (int r = 0; r < 10; ++r) {
    if (r != 0) {
      k0 += kPhiloxW0;
      k1 += kPhiloxW1;
    }
    c = philox_round(c, k0, k1);
  }
  return c;
}

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t u = (static_cast<std::uint64_t>(hi) << 32) | lo;
  return static_cast<double>(u >> 11) * 0x1.0p-53;
}

}  // namespace

void Philox::uniforms(std::uint64_t index, int n, double* out) const {
  int produced = 0;
  std::uint32_t slot = 0;
  while (produced < n) {
    Counter c{{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
               slot++, 0u}};
    c = philox10(c, key0_, key1_);
    out[produced++] = to_unit(c.v[0], c.v[1]);
    if (produced < n) out[produced++] = to_unit(c.v[2], c.v[3]);
  }
}

}  // namespace mcompton

#ifndef UCMEC_RANDOM_HPP
#define UCMEC_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace ucmec {

using Rng = std::mt19937_64;

// All draws below consume raw engine output directly so that streams reproduce
// bit-identically on any standard library.

inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * uniform01(rng);
}

inline double normal01(Rng& rng) {
  double u1 = uniform01(rng);
  while (u1 <= 0.0) u1 = uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
}

inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
  return rng() % n;
}

}  // namespace ucmec

#endif

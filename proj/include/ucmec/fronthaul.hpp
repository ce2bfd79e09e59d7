#ifndef UCMEC_FRONTHAUL_HPP
#define UCMEC_FRONTHAUL_HPP

#include <cmath>

#include "ucmec/config.hpp"
#include "ucmec/random.hpp"
#include "ucmec/types.hpp"

namespace ucmec {

inline double los_probability(double distance_m, double blockage_density) {
  return std::exp(-blockage_density * distance_m);
}

// Sectorial antenna gain of one link. The serving link is beam-aligned and
// deterministic; any other pairing draws one of the three lobe combinations.
double sample_gain(bool aligned, const NetworkConfig& cfg, Rng& rng);

// Per-slot mmWave channel state. Entries exist for every AP-CPU pair; gain is
// the aligned main-lobe product wherever the pair carries an active link and a
// sampled lobe combination elsewhere.
struct FronthaulState {
  IntMatrix los;   // N x K, 1 = line of sight
  Matrix gain;     // N x K, linear
  Matrix exponent; // N x K, path-loss exponent in effect
};

FronthaulState sample_fronthaul_state(const NetworkConfig& cfg,
                                      const Matrix& dist_ap_cpu,
                                      const IntMatrix& active, Rng& rng);

// SINR of active link (ap, cpu). Interference aggregates every other active
// link (i, j) as received at this CPU: the interferer's gain and LoS state
// toward this CPU, full fronthaul power per active link.
double fronthaul_sinr(int ap, int cpu, const FronthaulState& st,
                      const IntMatrix& active, const Matrix& dist_ap_cpu,
                      const NetworkConfig& cfg);

inline double fronthaul_rate(double sinr, double bandwidth_hz) {
  return bandwidth_hz * std::log2(1.0 + sinr);
}

}  // namespace ucmec

#endif

#ifndef UCMEC_ACCESS_CHANNEL_HPP
#define UCMEC_ACCESS_CHANNEL_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "ucmec/config.hpp"
#include "ucmec/random.hpp"
#include "ucmec/topology.hpp"
#include "ucmec/types.hpp"

namespace ucmec {

// Fixed propagation-environment term of the three-slope model, in dB.
// Frequency in MHz, heights in meters.
inline double pathloss_fixed_term_db(double freq_mhz, double ap_height_m,
                                     double user_height_m) {
  const double lf = std::log10(freq_mhz);
  return 46.3 + 33.9 * lf - 13.82 * std::log10(ap_height_m) -
         (1.11 * lf - 0.7) * user_height_m + 1.56 * lf - 0.8;
}

// Three-slope path loss in dB for a link of d meters. Negative-valued; the
// two breakpoints come from the config and the model is continuous across
// them.
double path_loss_db(double distance_m, const NetworkConfig& cfg);

// Correlated shadowing field: sqrt(delta) * ap_term + sqrt(1-delta) * user_term,
// both i.i.d. standard normal per node. Returns an M x N matrix.
Matrix draw_shadowing(int user_count, int ap_count, double delta, Rng& rng);

// Linear large-scale fading from path loss (dB) and shadowing (standard
// normal), elementwise: 10^(PL/10) * 10^(sigma*mu/10).
template <class D1, class D2>
auto large_scale_fading(const Eigen::ArrayBase<D1>& pathloss_db,
                        double shadow_std_db, const Eigen::ArrayBase<D2>& mu) {
  return Eigen::pow(10.0, (pathloss_db + shadow_std_db * mu) / 10.0);
}

// Variance of the MMSE channel estimate, elementwise:
// tau_p * p_pilot * beta^2 / (tau_p * p_pilot * beta + noise).
template <class D>
auto estimate_quality(double pilot_len, double pilot_power_w,
                      const Eigen::ArrayBase<D>& fading, double noise_w) {
  return pilot_len * pilot_power_w * fading.square() /
         (pilot_len * pilot_power_w * fading + noise_w);
}

// Per-user serving sets: the cluster_size APs with the best estimate quality,
// in descending order, ties resolved toward the smaller AP index.
IntMatrix form_clusters(const Matrix& quality, int cluster_size);

struct AccessChannelState {
  Matrix pathloss_db;  // M x N
  Matrix shadowing;    // M x N
  Matrix fading;       // M x N, linear
  Matrix quality;      // M x N, MMSE estimate variance
  IntMatrix clusters;  // M x cluster_size, AP indices
};

AccessChannelState build_access_state(const NetworkConfig& cfg,
                                      const Topology& topo, Rng& shadow_rng);

// Uplink SINR of user m under per-user transmit powers (W). The default form
// evaluates all sums over the victim's serving cluster; the literal flag
// switches the interference term to each interferer's own cluster.
double uplink_sinr(int user, const Vector& power_w, const AccessChannelState& st,
                   const NetworkConfig& cfg);

inline double uplink_rate(double sinr, double bandwidth_hz) {
  return bandwidth_hz * std::log2(1.0 + sinr);
}

}  // namespace ucmec

#endif

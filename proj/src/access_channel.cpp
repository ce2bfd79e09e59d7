#include "ucmec/access_channel.hpp"

#include <algorithm>
#include <numeric>

#include "ucmec/random.hpp"

namespace ucmec {

double path_loss_db(double distance_m, const NetworkConfig& cfg) {
  const double fixed = pathloss_fixed_term_db(cfg.carrier_freq_mhz,
                                              cfg.ap_height_m, cfg.user_height_m);
  const double d_km = distance_m / 1000.0;
  const double d0_km = cfg.breakpoint0_m / 1000.0;
  const double d1_km = cfg.breakpoint1_m / 1000.0;
  if (d_km > d1_km) return -fixed - 35.0 * std::log10(d_km);
  if (d_km > d0_km)
    return -fixed - 10.0 * std::log10(std::pow(d1_km, 1.5) * d_km * d_km);
  return -fixed - 10.0 * std::log10(std::pow(d1_km, 1.5) * d0_km * d0_km);
}

Matrix draw_shadowing(int user_count, int ap_count, double delta, Rng& rng) {
  Vector ap_term(ap_count), user_term(user_count);
  for (int n = 0; n < ap_count; ++n) ap_term(n) = normal01(rng);
  for (int m = 0; m < user_count; ++m) user_term(m) = normal01(rng);
  const double wa = std::sqrt(delta), wu = std::sqrt(1.0 - delta);
  Matrix mu(user_count, ap_count);
  for (int m = 0; m < user_count; ++m)
    for (int n = 0; n < ap_count; ++n)
      mu(m, n) = wa * ap_term(n) + wu * user_term(m);
  return mu;
}

IntMatrix form_clusters(const Matrix& quality, int cluster_size) {
  const int users = static_cast<int>(quality.rows());
  const int aps = static_cast<int>(quality.cols());
  IntMatrix clusters(users, cluster_size);
  std::vector<int> order(aps);
  for (int m = 0; m < users; ++m) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return quality(m, a) > quality(m, b);
    });
    for (int c = 0; c < cluster_size; ++c) clusters(m, c) = order[c];
  }
  return clusters;
}

AccessChannelState build_access_state(const NetworkConfig& cfg,
                                      const Topology& topo, Rng& shadow_rng) {
  AccessChannelState st;
  const int users = cfg.user_count, aps = cfg.ap_count;
  st.pathloss_db.resize(users, aps);
  for (int m = 0; m < users; ++m)
    for (int n = 0; n < aps; ++n)
      st.pathloss_db(m, n) = path_loss_db(topo.dist_user_ap(m, n), cfg);
  st.shadowing = draw_shadowing(users, aps, cfg.shadow_correlation, shadow_rng);
  st.fading = large_scale_fading(st.pathloss_db.array(), cfg.shadow_std_db,
                                 st.shadowing.array());
  // Pilots: one orthogonal sequence per user at full power.
  st.quality = estimate_quality(static_cast<double>(users), cfg.max_power_w,
                                st.fading.array(), cfg.access_noise_w());
  st.clusters = form_clusters(st.quality, cfg.effective_cluster_size());
  return st;
}

double uplink_sinr(int user, const Vector& power_w, const AccessChannelState& st,
                   const NetworkConfig& cfg) {
  const double p_own = power_w(user);
  if (p_own <= 0.0) return 0.0;
  const int users = static_cast<int>(st.quality.rows());
  const int width = static_cast<int>(st.clusters.cols());

  double quality_sum = 0.0;
  for (int c = 0; c < width; ++c) quality_sum += st.quality(user, st.clusters(user, c));
  const double numer =
      cfg.antennas_per_ap * p_own * quality_sum * quality_sum;

  double interference = 0.0;
  for (int i = 0; i < users; ++i) {
    if (i == user || power_w(i) <= 0.0) continue;
    double cross = 0.0;
    if (cfg.interference_literal_clusters) {
      for (int c = 0; c < width; ++c) {
        const int n = st.clusters(i, c);
        cross += st.quality(i, n) * st.fading(i, n);
      }
    } else {
      for (int c = 0; c < width; ++c) {
        const int n = st.clusters(user, c);
        cross += st.quality(user, n) * st.fading(i, n);
      }
    }
    interference += power_w(i) * cross;
  }
  const double denom = interference + cfg.access_noise_w() * quality_sum;
  return numer / denom;
}

}  // namespace ucmec

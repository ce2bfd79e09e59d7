#include "ucmec/fronthaul.hpp"

#include "ucmec/random.hpp"

namespace ucmec {

double sample_gain(bool aligned, const NetworkConfig& cfg, Rng& rng) {
  const double gm = cfg.main_lobe_gain, gs = cfg.side_lobe_gain;
  if (aligned) return gm * gm;
  const double frac = cfg.beamwidth_rad / (2.0 * M_PI);
  const double p_main_main = frac * frac;
  const double p_main_side = 2.0 * frac * (1.0 - frac);
  const double u = uniform01(rng);
  if (u < p_main_main) return gm * gm;
  if (u < p_main_main + p_main_side) return gm * gs;
  return gs * gs;
}

FronthaulState sample_fronthaul_state(const NetworkConfig& cfg,
                                      const Matrix& dist_ap_cpu,
                                      const IntMatrix& active, Rng& rng) {
  const int aps = static_cast<int>(active.rows());
  const int cpus = static_cast<int>(active.cols());
  FronthaulState st;
  st.los.resize(aps, cpus);
  st.gain.resize(aps, cpus);
  st.exponent.resize(aps, cpus);
  // Blockage and lobe draws cover every pair each slot, in a fixed order, so
  // the stream depends only on geometry and never on the chosen actions.
  for (int n = 0; n < aps; ++n) {
    for (int k = 0; k < cpus; ++k) {
      const double p_los =
          los_probability(dist_ap_cpu(n, k), cfg.blockage_density_per_m);
      st.los(n, k) = uniform01(rng) < p_los ? 1 : 0;
      st.exponent(n, k) =
          st.los(n, k) ? cfg.pathloss_exp_los : cfg.pathloss_exp_nlos;
      const double sampled = sample_gain(false, cfg, rng);
      st.gain(n, k) = active(n, k) ? sample_gain(true, cfg, rng) : sampled;
    }
  }
  return st;
}

double fronthaul_sinr(int ap, int cpu, const FronthaulState& st,
                      const IntMatrix& active, const Matrix& dist_ap_cpu,
                      const NetworkConfig& cfg) {
  const int aps = static_cast<int>(active.rows());
  const int cpus = static_cast<int>(active.cols());
  const double p = cfg.fronthaul_power_w;
  const double signal =
      p * st.gain(ap, cpu) * std::pow(dist_ap_cpu(ap, cpu), -st.exponent(ap, cpu));
  double interference = 0.0;
  for (int i = 0; i < aps; ++i) {
    const double toward_victim =
        p * st.gain(i, cpu) * std::pow(dist_ap_cpu(i, cpu), -st.exponent(i, cpu));
    for (int j = 0; j < cpus; ++j) {
      if (!active(i, j) || (i == ap && j == cpu)) continue;
      interference += toward_victim;
    }
  }
  return signal / (interference + cfg.fronthaul_noise_w());
}

}  // namespace ucmec

#ifndef UCMEC_CONFIG_HPP
#define UCMEC_CONFIG_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "ucmec/types.hpp"

namespace ucmec {

// Full description of one simulated deployment. Defaults reproduce the
// reference evaluation setup; every field can be overridden from JSON.
struct NetworkConfig {
  // Population and geometry
  int user_count = 10;
  int ap_count = 50;
  int cpu_count = 3;
  int antennas_per_ap = 4;
  int cluster_size = 4;
  double area_side_m = 900.0;
  std::vector<std::array<double, 2>> cpu_positions = {
      {300.0, 300.0}, {600.0, 300.0}, {450.0, 600.0}};
  // Optional explicit placements (mainly for controlled experiments); when
  // non-empty they override random placement and must match the counts.
  std::vector<std::array<double, 2>> user_positions;
  std::vector<std::array<double, 2>> ap_positions;

  // Slot structure
  double slot_duration_s = 0.1;
  int episode_slots = 300;

  // Access channel (sub-6 GHz)
  double access_bandwidth_hz = 20e6;
  double carrier_freq_mhz = 1900.0;
  double ap_height_m = 15.0;
  double user_height_m = 1.65;
  double breakpoint0_m = 10.0;
  double breakpoint1_m = 15.0;
  double shadow_std_db = 8.0;
  double shadow_correlation = 0.5;
  double noise_psd_dbm_hz = -174.0;
  double max_power_w = 0.1;
  // Uplink power menu; empty means "derive from power_fractions * max_power_w".
  std::vector<double> power_levels_w;
  std::vector<double> power_fractions = {0.0, 0.2, 0.4, 0.6, 0.8, 1.0};

  // Fronthaul (mmWave)
  double fronthaul_bandwidth_hz = 1e9;
  double fronthaul_power_w = 1.0;
  double blockage_density_per_m = 6e-4;
  double beamwidth_rad = 30.0 * M_PI / 180.0;
  double main_lobe_gain = 10.0;  // linear (10 dB)
  double side_lobe_gain = 0.1;   // linear (-10 dB)
  double pathloss_exp_los = 2.5;
  double pathloss_exp_nlos = 4.0;

  // Tasks and computing
  double task_bits_min = 4e5;
  double task_bits_max = 8e5;
  double task_density_min = 500.0;  // cycles per bit
  double task_density_max = 1000.0;
  double local_capacity_min_hz = 2e9;
  double local_capacity_max_hz = 5e9;
  double edge_capacity_min_hz = 10e9;
  double edge_capacity_max_hz = 20e9;

  // Rewards
  double reward_penalty_noncoop = 0.6;
  double reward_penalty_coop = 0.8;
  double drop_penalty_weight = 0.0;  // 0 = literal reward formula

  // Behavior switches
  bool fixed_topology = false;
  bool redraw_fading_per_slot = false;
  bool freeze_blockage_per_episode = false;
  // When true the uplink interference term follows the literal per-interferer
  // cluster indexing instead of the standard victim-cluster form.
  bool interference_literal_clusters = false;
  // Cellular baseline: single serving AP, no fronthaul stage.
  bool cellular_mode = false;

  // Derived quantities
  std::vector<double> power_levels() const;
  double access_noise_w() const;
  double fronthaul_noise_w() const;
  int effective_cluster_size() const;

  // Throws std::invalid_argument with a description on the first violated
  // structural constraint.
  void validate() const;
};

NetworkConfig load_network_config(const std::string& path);
std::string network_config_to_json(const NetworkConfig& cfg);
NetworkConfig network_config_from_json(const std::string& text);

}  // namespace ucmec

#endif

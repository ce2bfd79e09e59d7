#include "ucmec/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ucmec {

using nlohmann::json;

std::vector<double> NetworkConfig::power_levels() const {
  if (!power_levels_w.empty()) return power_levels_w;
  std::vector<double> out;
  out.reserve(power_fractions.size());
  for (double f : power_fractions) out.push_back(f * max_power_w);
  return out;
}

double NetworkConfig::access_noise_w() const {
  return std::pow(10.0, (noise_psd_dbm_hz - 30.0) / 10.0) * access_bandwidth_hz;
}

double NetworkConfig::fronthaul_noise_w() const {
  return std::pow(10.0, (noise_psd_dbm_hz - 30.0) / 10.0) * fronthaul_bandwidth_hz;
}

int NetworkConfig::effective_cluster_size() const {
  return cellular_mode ? 1 : cluster_size;
}

namespace {

[[noreturn]] void fail(const std::string& what) {
  throw std::invalid_argument("invalid config: " + what);
}

}  // namespace

void NetworkConfig::validate() const {
  if (user_count < 1) fail("user_count must be >= 1");
  if (ap_count < 1) fail("ap_count must be >= 1");
  if (cpu_count < 1) fail("cpu_count must be >= 1");
  if (antennas_per_ap < 1) fail("antennas_per_ap must be >= 1");
  if (cluster_size < 1) fail("cluster_size must be >= 1");
  if (effective_cluster_size() > ap_count) fail("cluster_size exceeds ap_count");
  if (area_side_m <= 0) fail("area_side_m must be positive");
  if (static_cast<int>(cpu_positions.size()) != cpu_count)
    fail("cpu_positions must have exactly cpu_count entries");
  for (const auto& p : cpu_positions)
    if (p[0] < 0 || p[0] > area_side_m || p[1] < 0 || p[1] > area_side_m)
      fail("cpu position outside the service area");
  if (!user_positions.empty() &&
      static_cast<int>(user_positions.size()) != user_count)
    fail("user_positions must be empty or have user_count entries");
  if (!ap_positions.empty() && static_cast<int>(ap_positions.size()) != ap_count)
    fail("ap_positions must be empty or have ap_count entries");
  if (slot_duration_s <= 0) fail("slot_duration_s must be positive");
  if (episode_slots < 1) fail("episode_slots must be >= 1");
  if (access_bandwidth_hz <= 0) fail("access_bandwidth_hz must be positive");
  if (fronthaul_bandwidth_hz <= 0) fail("fronthaul_bandwidth_hz must be positive");
  if (carrier_freq_mhz <= 0) fail("carrier_freq_mhz must be positive");
  if (ap_height_m <= 0 || user_height_m <= 0) fail("antenna heights must be positive");
  if (breakpoint0_m <= 0 || breakpoint1_m <= breakpoint0_m)
    fail("breakpoints must satisfy 0 < d0 < d1");
  if (shadow_std_db < 0) fail("shadow_std_db must be non-negative");
  if (shadow_correlation < 0 || shadow_correlation > 1)
    fail("shadow_correlation must lie in [0, 1]");
  if (max_power_w <= 0) fail("max_power_w must be positive");
  const auto levels = power_levels();
  if (levels.size() < 2) fail("need at least two power levels");
  if (levels.front() != 0.0) fail("first power level must be 0");
  if (std::abs(levels.back() - max_power_w) > 1e-12 * max_power_w)
    fail("last power level must equal max_power_w");
  for (std::size_t i = 1; i < levels.size(); ++i)
    if (levels[i] <= levels[i - 1]) fail("power levels must be strictly increasing");
  if (fronthaul_power_w <= 0) fail("fronthaul_power_w must be positive");
  if (blockage_density_per_m < 0) fail("blockage_density_per_m must be non-negative");
  if (beamwidth_rad <= 0 || beamwidth_rad > 2.0 * M_PI)
    fail("beamwidth_rad must lie in (0, 2pi]");
  if (main_lobe_gain <= 0 || side_lobe_gain <= 0) fail("lobe gains must be positive");
  if (pathloss_exp_los <= 0 || pathloss_exp_nlos <= 0)
    fail("path-loss exponents must be positive");
  if (task_bits_min <= 0 || task_bits_max < task_bits_min)
    fail("task bit range must satisfy 0 < min <= max");
  if (task_density_min <= 0 || task_density_max < task_density_min)
    fail("task density range must satisfy 0 < min <= max");
  if (local_capacity_min_hz <= 0 || local_capacity_max_hz < local_capacity_min_hz)
    fail("local capacity range must satisfy 0 < min <= max");
  if (edge_capacity_min_hz <= 0 || edge_capacity_max_hz < edge_capacity_min_hz)
    fail("edge capacity range must satisfy 0 < min <= max");
  if (reward_penalty_noncoop < 0 || reward_penalty_coop < 0)
    fail("reward penalty weights must be non-negative");
  if (drop_penalty_weight < 0) fail("drop_penalty_weight must be non-negative");
}

namespace {

std::vector<std::array<double, 2>> positions_from_json(const json& j) {
  std::vector<std::array<double, 2>> out;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2) fail("positions must be [x, y] pairs");
    out.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return out;
}

json positions_to_json(const std::vector<std::array<double, 2>>& v) {
  json j = json::array();
  for (const auto& p : v) j.push_back({p[0], p[1]});
  return j;
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

NetworkConfig network_config_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("JSON parse error: ") + e.what());
  }
  if (!j.is_object()) fail("top level must be a JSON object");
  NetworkConfig cfg;
  read_if(j, "user_count", cfg.user_count);
  read_if(j, "ap_count", cfg.ap_count);
  read_if(j, "cpu_count", cfg.cpu_count);
  read_if(j, "antennas_per_ap", cfg.antennas_per_ap);
  read_if(j, "cluster_size", cfg.cluster_size);
  read_if(j, "area_side_m", cfg.area_side_m);
  if (j.contains("cpu_positions"))
    cfg.cpu_positions = positions_from_json(j.at("cpu_positions"));
  if (j.contains("user_positions"))
    cfg.user_positions = positions_from_json(j.at("user_positions"));
  if (j.contains("ap_positions"))
    cfg.ap_positions = positions_from_json(j.at("ap_positions"));
  read_if(j, "slot_duration_s", cfg.slot_duration_s);
  read_if(j, "episode_slots", cfg.episode_slots);
  read_if(j, "access_bandwidth_hz", cfg.access_bandwidth_hz);
  read_if(j, "carrier_freq_mhz", cfg.carrier_freq_mhz);
  read_if(j, "ap_height_m", cfg.ap_height_m);
  read_if(j, "user_height_m", cfg.user_height_m);
  read_if(j, "breakpoint0_m", cfg.breakpoint0_m);
  read_if(j, "breakpoint1_m", cfg.breakpoint1_m);
  read_if(j, "shadow_std_db", cfg.shadow_std_db);
  read_if(j, "shadow_correlation", cfg.shadow_correlation);
  read_if(j, "noise_psd_dbm_hz", cfg.noise_psd_dbm_hz);
  read_if(j, "max_power_w", cfg.max_power_w);
  read_if(j, "power_levels_w", cfg.power_levels_w);
  read_if(j, "power_fractions", cfg.power_fractions);
  read_if(j, "fronthaul_bandwidth_hz", cfg.fronthaul_bandwidth_hz);
  read_if(j, "fronthaul_power_w", cfg.fronthaul_power_w);
  read_if(j, "blockage_density_per_m", cfg.blockage_density_per_m);
  read_if(j, "beamwidth_rad", cfg.beamwidth_rad);
  read_if(j, "main_lobe_gain", cfg.main_lobe_gain);
  read_if(j, "side_lobe_gain", cfg.side_lobe_gain);
  read_if(j, "pathloss_exp_los", cfg.pathloss_exp_los);
  read_if(j, "pathloss_exp_nlos", cfg.pathloss_exp_nlos);
  read_if(j, "task_bits_min", cfg.task_bits_min);
  read_if(j, "task_bits_max", cfg.task_bits_max);
  read_if(j, "task_density_min", cfg.task_density_min);
  read_if(j, "task_density_max", cfg.task_density_max);
  read_if(j, "local_capacity_min_hz", cfg.local_capacity_min_hz);
  read_if(j, "local_capacity_max_hz", cfg.local_capacity_max_hz);
  read_if(j, "edge_capacity_min_hz", cfg.edge_capacity_min_hz);
  read_if(j, "edge_capacity_max_hz", cfg.edge_capacity_max_hz);
  read_if(j, "reward_penalty_noncoop", cfg.reward_penalty_noncoop);
  read_if(j, "reward_penalty_coop", cfg.reward_penalty_coop);
  read_if(j, "drop_penalty_weight", cfg.drop_penalty_weight);
  read_if(j, "fixed_topology", cfg.fixed_topology);
  read_if(j, "redraw_fading_per_slot", cfg.redraw_fading_per_slot);
  read_if(j, "freeze_blockage_per_episode", cfg.freeze_blockage_per_episode);
  read_if(j, "interference_literal_clusters", cfg.interference_literal_clusters);
  read_if(j, "cellular_mode", cfg.cellular_mode);
  cfg.validate();
  return cfg;
}

NetworkConfig load_network_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return network_config_from_json(ss.str());
}

std::string network_config_to_json(const NetworkConfig& cfg) {
  json j;
  j["user_count"] = cfg.user_count;
  j["ap_count"] = cfg.ap_count;
  j["cpu_count"] = cfg.cpu_count;
  j["antennas_per_ap"] = cfg.antennas_per_ap;
  j["cluster_size"] = cfg.cluster_size;
  j["area_side_m"] = cfg.area_side_m;
  j["cpu_positions"] = positions_to_json(cfg.cpu_positions);
  if (!cfg.user_positions.empty())
    j["user_positions"] = positions_to_json(cfg.user_positions);
  if (!cfg.ap_positions.empty())
    j["ap_positions"] = positions_to_json(cfg.ap_positions);
  j["slot_duration_s"] = cfg.slot_duration_s;
  j["episode_slots"] = cfg.episode_slots;
  j["access_bandwidth_hz"] = cfg.access_bandwidth_hz;
  j["carrier_freq_mhz"] = cfg.carrier_freq_mhz;
  j["ap_height_m"] = cfg.ap_height_m;
  j["user_height_m"] = cfg.user_height_m;
  j["breakpoint0_m"] = cfg.breakpoint0_m;
  j["breakpoint1_m"] = cfg.breakpoint1_m;
  j["shadow_std_db"] = cfg.shadow_std_db;
  j["shadow_correlation"] = cfg.shadow_correlation;
  j["noise_psd_dbm_hz"] = cfg.noise_psd_dbm_hz;
  j["max_power_w"] = cfg.max_power_w;
  if (!cfg.power_levels_w.empty()) j["power_levels_w"] = cfg.power_levels_w;
  j["power_fractions"] = cfg.power_fractions;
  j["fronthaul_bandwidth_hz"] = cfg.fronthaul_bandwidth_hz;
  j["fronthaul_power_w"] = cfg.fronthaul_power_w;
  j["blockage_density_per_m"] = cfg.blockage_density_per_m;
  j["beamwidth_rad"] = cfg.beamwidth_rad;
  j["main_lobe_gain"] = cfg.main_lobe_gain;
  j["side_lobe_gain"] = cfg.side_lobe_gain;
  j["pathloss_exp_los"] = cfg.pathloss_exp_los;
  j["pathloss_exp_nlos"] = cfg.pathloss_exp_nlos;
  j["task_bits_min"] = cfg.task_bits_min;
  j["task_bits_max"] = cfg.task_bits_max;
  j["task_density_min"] = cfg.task_density_min;
  j["task_density_max"] = cfg.task_density_max;
  j["local_capacity_min_hz"] = cfg.local_capacity_min_hz;
  j["local_capacity_max_hz"] = cfg.local_capacity_max_hz;
  j["edge_capacity_min_hz"] = cfg.edge_capacity_min_hz;
  j["edge_capacity_max_hz"] = cfg.edge_capacity_max_hz;
  j["reward_penalty_noncoop"] = cfg.reward_penalty_noncoop;
  j["reward_penalty_coop"] = cfg.reward_penalty_coop;
  j["drop_penalty_weight"] = cfg.drop_penalty_weight;
  j["fixed_topology"] = cfg.fixed_topology;
  j["redraw_fading_per_slot"] = cfg.redraw_fading_per_slot;
  j["freeze_blockage_per_episode"] = cfg.freeze_blockage_per_episode;
  j["interference_literal_clusters"] = cfg.interference_literal_clusters;
  j["cellular_mode"] = cfg.cellular_mode;
  return j.dump(2);
}

}  // namespace ucmec

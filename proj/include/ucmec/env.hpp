#ifndef UCMEC_ENV_HPP
#define UCMEC_ENV_HPP

#include <cstdint>
#include <vector>

#include "ucmec/access_channel.hpp"
#include "ucmec/config.hpp"
#include "ucmec/delay.hpp"
#include "ucmec/fronthaul.hpp"
#include "ucmec/random.hpp"
#include "ucmec/topology.hpp"
#include "ucmec/types.hpp"

namespace ucmec {

// One user's slot outcome, flattened for CSV export.
struct StepRecord {
  int episode = 0;
  int slot = 0;
  int user = 0;
  int target = 0;  // 0 = local, 1..K = CPU index + 1
  int power_index = 0;
  double access_sinr = 0.0;
  double access_rate_bps = 0.0;
  double local_s = 0.0;
  double access_s = 0.0;
  double fronthaul_s = 0.0;
  double edge_s = 0.0;
  double total_s = 0.0;
  bool dropped = false;
  double reward = 0.0;
};

// Invariants checked on every slot. All counters stay zero in a correct run;
// anything nonzero means a constraint was violated somewhere upstream.
struct AuditCounters {
  std::int64_t slots = 0;
  std::int64_t target_range = 0;   // target outside 0..K
  std::int64_t power_range = 0;    // power index outside the menu
  std::int64_t power_budget = 0;   // transmit power above the cap
  std::int64_t cluster_width = 0;  // serving set of the wrong size
  std::int64_t deadline = 0;       // recorded delay above the slot length
  std::int64_t capacity = 0;       // CPU handing out more than it has

  std::int64_t total_violations() const {
    return target_range + power_range + power_budget + cluster_width +
           deadline + capacity;
  }
};

struct StepResult {
  Matrix next_obs;  // M x obs_dim
  Vector rewards;   // M
  bool done = false;
  std::vector<StepRecord> records;  // one per user
};

// Slot-level decision process over the network model. Each user picks a
// processing target (local or one CPU) and an uplink power level per slot.
// Observations stack the current task with the user's previous action and
// delay; cooperative mode appends every other user's previous action and the
// mean of their delays.
class Env {
 public:
  Env(const NetworkConfig& cfg, std::uint64_t master_seed, bool cooperative);

  int user_count() const { return cfg_.user_count; }
  int target_count() const { return cfg_.cpu_count + 1; }
  int power_level_count() const { return static_cast<int>(powers_.size()); }
  int observation_dim() const;
  bool cooperative() const { return coop_; }

  // Starts the given episode and returns the initial M x obs_dim observation.
  // Must be called before the first step.
  Matrix reset(int episode);

  // actions: M x 2 columns (target, power index). Out-of-range entries are
  // counted in the audit and clamped.
  StepResult step(const IntMatrix& actions);

  const NetworkConfig& config() const { return cfg_; }
  const Topology& topology() const { return topo_; }
  const AccessChannelState& access() const { return access_; }
  const AuditCounters& audit() const { return audit_; }
  int slot() const { return slot_; }
  int episode() const { return episode_; }

 private:
  Matrix observe() const;
  void rebuild_access();

  NetworkConfig cfg_;
  std::uint64_t master_;
  bool coop_;
  std::vector<double> powers_;

  Topology topo_;
  AccessChannelState access_;
  FronthaulState fronthaul_base_;
  Rng shadow_rng_;
  Rng tasks_rng_;
  Rng blockage_rng_;

  int episode_ = 0;
  int slot_ = 0;
  bool ready_ = false;
  TaskBatch current_;
  IntMatrix prev_actions_;  // M x 2
  Vector prev_delay_s_;     // M
  AuditCounters audit_;
};

}  // namespace ucmec

#endif

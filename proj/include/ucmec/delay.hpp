#ifndef UCMEC_DELAY_HPP
#define UCMEC_DELAY_HPP

#include "ucmec/config.hpp"
#include "ucmec/random.hpp"
#include "ucmec/types.hpp"

namespace ucmec {

// One slot's task arrivals.
struct TaskBatch {
  Vector bits;     // M, task size in bits
  Vector density;  // M, cycles per bit
};

TaskBatch draw_tasks(const NetworkConfig& cfg, Rng& rng);

inline double task_work_cycles(const TaskBatch& tasks, int user) {
  return tasks.bits(user) * tasks.density(user);
}

// AP-CPU pairs that carry traffic: link (n, k) is active when some user
// offloads to CPU k and AP n serves that user.
IntMatrix active_links(const IntVector& targets, const IntMatrix& clusters,
                       int ap_count, int cpu_count);

// Per-user delay decomposition for one slot. Components are the raw computed
// values (offload components can be infinite when a rate or allocation is
// zero); total is clamped at the deadline and dropped is set when the raw
// total exceeds it.
struct DelayBreakdown {
  Vector local_s;      // M
  Vector access_s;     // M
  Vector fronthaul_s;  // M
  Vector edge_s;       // M
  Vector total_raw_s;  // M, before deadline clamp
  Vector total_s;      // M, clamped at the deadline
  ArrayX<bool> dropped;
};

// targets: 0 = local, 1..K = CPU index + 1. uplink_rate_bps per user (only
// read for offloaders), fronthaul_rate_bps per AP-CPU pair (only read for
// active links), allocation_hz per user (cycles/s granted at the target CPU).
DelayBreakdown compute_delays(const IntVector& targets, const TaskBatch& tasks,
                              const Vector& uplink_rate_bps,
                              const Matrix& fronthaul_rate_bps,
                              const Vector& allocation_hz,
                              const IntMatrix& clusters,
                              const Vector& local_capacity_hz,
                              double deadline_s, bool skip_fronthaul);

}  // namespace ucmec

#endif

#include "ucmec/delay.hpp"

#include <limits>

#include "ucmec/random.hpp"

namespace ucmec {

TaskBatch draw_tasks(const NetworkConfig& cfg, Rng& rng) {
  TaskBatch batch;
  batch.bits.resize(cfg.user_count);
  batch.density.resize(cfg.user_count);
  for (int m = 0; m < cfg.user_count; ++m) {
    batch.bits(m) = uniform_range(rng, cfg.task_bits_min, cfg.task_bits_max);
    batch.density(m) =
        uniform_range(rng, cfg.task_density_min, cfg.task_density_max);
  }
  return batch;
}

IntMatrix active_links(const IntVector& targets, const IntMatrix& clusters,
                       int ap_count, int cpu_count) {
  IntMatrix active = IntMatrix::Zero(ap_count, cpu_count);
  for (Eigen::Index m = 0; m < targets.size(); ++m) {
    if (targets(m) <= 0) continue;
    const int k = targets(m) - 1;
    for (Eigen::Index c = 0; c < clusters.cols(); ++c)
      active(clusters(m, c), k) = 1;
  }
  return active;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double safe_div(double num, double den) { return den > 0.0 ? num / den : kInf; }

}  // namespace

DelayBreakdown compute_delays(const IntVector& targets, const TaskBatch& tasks,
                              const Vector& uplink_rate_bps,
                              const Matrix& fronthaul_rate_bps,
                              const Vector& allocation_hz,
                              const IntMatrix& clusters,
                              const Vector& local_capacity_hz,
                              double deadline_s, bool skip_fronthaul) {
  const int users = static_cast<int>(targets.size());
  DelayBreakdown d;
  d.local_s = Vector::Zero(users);
  d.access_s = Vector::Zero(users);
  d.fronthaul_s = Vector::Zero(users);
  d.edge_s = Vector::Zero(users);
  d.total_raw_s.resize(users);
  d.total_s.resize(users);
  d.dropped.resize(users);

  for (int m = 0; m < users; ++m) {
    const double work = task_work_cycles(tasks, m);
    if (targets(m) <= 0) {
      d.local_s(m) = safe_div(work, local_capacity_hz(m));
    } else {
      const int k = targets(m) - 1;
      d.access_s(m) = safe_div(tasks.bits(m), uplink_rate_bps(m));
      if (!skip_fronthaul) {
        double slowest = 0.0;
        for (Eigen::Index c = 0; c < clusters.cols(); ++c) {
          const double t =
              safe_div(tasks.bits(m), fronthaul_rate_bps(clusters(m, c), k));
          slowest = std::max(slowest, t);
        }
        d.fronthaul_s(m) = slowest;
      }
      d.edge_s(m) = safe_div(work, allocation_hz(m));
    }
    const double offload = d.access_s(m) + d.fronthaul_s(m) + d.edge_s(m);
    d.total_raw_s(m) = std::max(d.local_s(m), offload);
    // The comparison is written so that inf and NaN both land in the dropped
    // branch instead of faulting.
    if (d.total_raw_s(m) <= deadline_s) {
      d.total_s(m) = d.total_raw_s(m);
      d.dropped(m) = false;
    } else {
      d.total_s(m) = deadline_s;
      d.dropped(m) = true;
    }
  }
  return d;
}

}  // namespace ucmec

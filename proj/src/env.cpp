#include "ucmec/env.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "ucmec/allocator.hpp"
#include "ucmec/seeding.hpp"

namespace ucmec {

Env::Env(const NetworkConfig& cfg, std::uint64_t master_seed, bool cooperative)
    : cfg_(cfg), master_(master_seed), coop_(cooperative) {
  cfg_.validate();
  powers_ = cfg_.power_levels();
}

int Env::observation_dim() const {
  const int own = 3 + target_count() + power_level_count();
  if (!coop_) return own;
  return own +
         (cfg_.user_count - 1) * (target_count() + power_level_count()) + 1;
}

void Env::rebuild_access() {
  access_ = build_access_state(cfg_, topo_, shadow_rng_);
}

Matrix Env::reset(int episode) {
  episode_ = episode;
  slot_ = 0;
  ready_ = true;
  const auto ep = static_cast<std::uint64_t>(episode);

  const std::uint64_t place_ep = cfg_.fixed_topology ? 0 : ep;
  topo_ = place_nodes(cfg_, derive_seed(master_, Stream::Placement, place_ep));

  shadow_rng_ = make_rng(master_, Stream::Shadowing, ep);
  tasks_rng_ = make_rng(master_, Stream::Tasks, ep);
  blockage_rng_ = make_rng(master_, Stream::Blockage, ep);
  rebuild_access();

  if (!cfg_.cellular_mode && cfg_.freeze_blockage_per_episode) {
    const IntMatrix none = IntMatrix::Zero(cfg_.ap_count, cfg_.cpu_count);
    fronthaul_base_ =
        sample_fronthaul_state(cfg_, topo_.dist_ap_cpu, none, blockage_rng_);
  }

  current_ = draw_tasks(cfg_, tasks_rng_);
  prev_actions_ = IntMatrix::Zero(cfg_.user_count, 2);
  prev_delay_s_ = Vector::Zero(cfg_.user_count);
  return observe();
}

Matrix Env::observe() const {
  const int users = cfg_.user_count;
  const int tc = target_count();
  const int pc = power_level_count();
  Matrix obs = Matrix::Zero(users, observation_dim());
  for (int m = 0; m < users; ++m) {
    int at = 0;
    obs(m, at++) = current_.bits(m) / cfg_.task_bits_max;
    obs(m, at++) = current_.density(m) / cfg_.task_density_max;
    obs(m, at + prev_actions_(m, 0)) = 1.0;
    at += tc;
    obs(m, at + prev_actions_(m, 1)) = 1.0;
    at += pc;
    obs(m, at++) = prev_delay_s_(m) / cfg_.slot_duration_s;
    if (!coop_) continue;
    double peer_delay = 0.0;
    for (int j = 0; j < users; ++j) {
      if (j == m) continue;
      obs(m, at + prev_actions_(j, 0)) = 1.0;
      at += tc;
      obs(m, at + prev_actions_(j, 1)) = 1.0;
      at += pc;
      peer_delay += prev_delay_s_(j);
    }
    if (users > 1) peer_delay /= (users - 1) * cfg_.slot_duration_s;
    obs(m, at) = peer_delay;
  }
  return obs;
}

StepResult Env::step(const IntMatrix& actions) {
  if (!ready_) throw std::logic_error("Env::step before reset");
  const int users = cfg_.user_count;
  const int cpus = cfg_.cpu_count;
  if (actions.rows() != users || actions.cols() != 2)
    throw std::invalid_argument("actions must be user_count x 2");

  audit_.slots += 1;
  IntVector targets(users);
  IntVector power_idx(users);
  for (int m = 0; m < users; ++m) {
    int t = actions(m, 0);
    int p = actions(m, 1);
    if (t < 0 || t > cpus) {
      audit_.target_range += 1;
      t = std::clamp(t, 0, cpus);
    }
    if (p < 0 || p >= power_level_count()) {
      audit_.power_range += 1;
      p = std::clamp(p, 0, power_level_count() - 1);
    }
    targets(m) = t;
    power_idx(m) = p;
  }

  if (cfg_.redraw_fading_per_slot && slot_ > 0) rebuild_access();
  if (access_.clusters.cols() != cfg_.effective_cluster_size())
    audit_.cluster_width += 1;

  Vector power_w = Vector::Zero(users);
  for (int m = 0; m < users; ++m) {
    if (targets(m) > 0) power_w(m) = powers_[power_idx(m)];
    if (power_w(m) > cfg_.max_power_w * (1.0 + 1e-12)) audit_.power_budget += 1;
  }

  Vector sinr = Vector::Zero(users);
  Vector rate = Vector::Zero(users);
  for (int m = 0; m < users; ++m) {
    if (targets(m) == 0) continue;
    sinr(m) = uplink_sinr(m, power_w, access_, cfg_);
    rate(m) = uplink_rate(sinr(m), cfg_.access_bandwidth_hz);
  }

  const IntMatrix active =
      active_links(targets, access_.clusters, cfg_.ap_count, cpus);
  Matrix fh_rate = Matrix::Zero(cfg_.ap_count, cpus);
  if (!cfg_.cellular_mode) {
    FronthaulState st;
    if (cfg_.freeze_blockage_per_episode) {
      st = fronthaul_base_;
      const double aligned = cfg_.main_lobe_gain * cfg_.main_lobe_gain;
      for (int n = 0; n < cfg_.ap_count; ++n)
        for (int k = 0; k < cpus; ++k)
          if (active(n, k)) st.gain(n, k) = aligned;
    } else {
      st = sample_fronthaul_state(cfg_, topo_.dist_ap_cpu, active,
                                  blockage_rng_);
    }
    for (int n = 0; n < cfg_.ap_count; ++n)
      for (int k = 0; k < cpus; ++k)
        if (active(n, k))
          fh_rate(n, k) = fronthaul_rate(
              fronthaul_sinr(n, k, st, active, topo_.dist_ap_cpu, cfg_),
              cfg_.fronthaul_bandwidth_hz);
  }

  // Arrival delay at the CPU decides each offloader's share of it.
  Vector allocation = Vector::Zero(users);
  const double deadline = cfg_.slot_duration_s;
  for (int k = 0; k < cpus; ++k) {
    std::vector<int> members;
    for (int m = 0; m < users; ++m)
      if (targets(m) == k + 1) members.push_back(m);
    if (members.empty()) continue;
    AllocationInstance inst;
    const int count = static_cast<int>(members.size());
    inst.work_cycles.resize(count);
    inst.fixed_delay_s.resize(count);
    for (int i = 0; i < count; ++i) {
      const int m = members[i];
      inst.work_cycles(i) = task_work_cycles(current_, m);
      const double inf = std::numeric_limits<double>::infinity();
      const double access_s = rate(m) > 0.0 ? current_.bits(m) / rate(m) : inf;
      double fh_s = 0.0;
      if (!cfg_.cellular_mode) {
        for (int c = 0; c < access_.clusters.cols(); ++c) {
          const double r = fh_rate(access_.clusters(m, c), k);
          const double leg = r > 0.0 ? current_.bits(m) / r : inf;
          fh_s = std::max(fh_s, leg);
        }
      }
      inst.fixed_delay_s(i) = access_s + fh_s;
    }
    inst.capacity_hz = topo_.edge_capacity_hz(k);
    inst.deadline_s = deadline;
    const AllocationResult res = allocate(inst);
    double granted = 0.0;
    for (int i = 0; i < count; ++i) {
      allocation(members[i]) = res.allocation_hz(i);
      granted += res.allocation_hz(i);
    }
    if (granted > inst.capacity_hz * (1.0 + 1e-9)) audit_.capacity += 1;
  }

  const DelayBreakdown delays = compute_delays(
      targets, current_, rate, fh_rate, allocation, access_.clusters,
      topo_.local_capacity_hz, deadline, cfg_.cellular_mode);

  StepResult out;
  out.rewards.resize(users);
  const double kappa =
      coop_ ? cfg_.reward_penalty_coop : cfg_.reward_penalty_noncoop;
  Vector util(users);
  for (int m = 0; m < users; ++m) {
    const double t = delays.total_s(m);
    util(m) = -t + kappa * (deadline - t) -
              cfg_.drop_penalty_weight * (delays.dropped(m) ? 1.0 : 0.0);
    if (t > deadline * (1.0 + 1e-12)) audit_.deadline += 1;
  }
  if (coop_)
    out.rewards.setConstant(util.mean());
  else
    out.rewards = util;

  out.records.reserve(users);
  for (int m = 0; m < users; ++m) {
    StepRecord r;
    r.episode = episode_;
    r.slot = slot_;
    r.user = m;
    r.target = targets(m);
    r.power_index = power_idx(m);
    r.access_sinr = sinr(m);
    r.access_rate_bps = rate(m);
    r.local_s = delays.local_s(m);
    r.access_s = delays.access_s(m);
    r.fronthaul_s = delays.fronthaul_s(m);
    r.edge_s = delays.edge_s(m);
    r.total_s = delays.total_s(m);
    r.dropped = delays.dropped(m);
    r.reward = out.rewards(m);
    out.records.push_back(r);
  }

  prev_actions_.col(0) = targets;
  prev_actions_.col(1) = power_idx;
  prev_delay_s_ = delays.total_s;
  slot_ += 1;
  out.done = slot_ >= cfg_.episode_slots;
  current_ = draw_tasks(cfg_, tasks_rng_);
  out.next_obs = observe();
  return out;
}

}  // namespace ucmec

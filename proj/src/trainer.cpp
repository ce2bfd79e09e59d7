#include "ucmec/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "ucmec/seeding.hpp"

namespace ucmec {

namespace {

struct ActionSample {
  int target = 0;
  int power = 0;
  double logp = 0.0;
};

ActionSample select_action(const Mlp& actor, const Matrix& obs_row, bool greedy,
                           bool force_max_power, Rng& rng) {
  const std::vector<Matrix> logits = actor.forward(obs_row);
  const Vector lt = logits[0].row(0).transpose();
  const Vector lp = logits[1].row(0).transpose();
  ActionSample a;
  a.target = greedy ? argmax_index(lt) : sample_categorical(lt, rng);
  if (force_max_power) {
    a.power = static_cast<int>(lp.size()) - 1;
    IntVector t(1);
    t << a.target;
    a.logp = chosen_log_prob(lt.transpose(), t)(0);
  } else {
    a.power = greedy ? argmax_index(lp) : sample_categorical(lp, rng);
    IntVector t(1), p(1);
    t << a.target;
    p << a.power;
    a.logp = chosen_log_prob(lt.transpose(), t)(0) +
             chosen_log_prob(lp.transpose(), p)(0);
  }
  return a;
}

Vector normalized(const Vector& adv) {
  const double mean = adv.mean();
  const double var = (adv.array() - mean).square().sum() /
                     std::max<double>(1.0, static_cast<double>(adv.size()));
  return (adv.array() - mean) / (std::sqrt(var) + 1e-8);
}

std::vector<int> shuffled_indices(int n, Rng& rng) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int i = n - 1; i > 0; --i) {
    const int j = static_cast<int>(uniform_below(rng, i + 1));
    std::swap(idx[i], idx[j]);
  }
  return idx;
}

Matrix take_rows(const Matrix& src, const std::vector<int>& idx, int from,
                 int count) {
  Matrix out(count, src.cols());
  for (int i = 0; i < count; ++i) out.row(i) = src.row(idx[from + i]);
  return out;
}

Vector take(const Vector& src, const std::vector<int>& idx, int from,
            int count) {
  Vector out(count);
  for (int i = 0; i < count; ++i) out(i) = src(idx[from + i]);
  return out;
}

IntMatrix take_rows_int(const IntMatrix& src, const std::vector<int>& idx,
                        int from, int count) {
  IntMatrix out(count, src.cols());
  for (int i = 0; i < count; ++i) out.row(i) = src.row(idx[from + i]);
  return out;
}

// Flat rollout storage for one agent (or the shared team streams).
struct Rollout {
  Matrix obs;        // L x obs_dim
  IntMatrix actions; // L x 2
  Vector logp;       // L
  Vector rewards;    // L
  Vector values;     // L
  std::vector<std::uint8_t> dones;
  int fill = 0;

  void init(int len, int obs_dim) {
    obs.resize(len, obs_dim);
    actions.resize(len, 2);
    logp.resize(len);
    rewards.resize(len);
    values.resize(len);
    dones.assign(len, 0);
    fill = 0;
  }
};

struct UpdateStats {
  int skipped = 0;
  // Means over the batches of the most recent parameter update.
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
};

struct LossAccum {
  double policy = 0.0;
  double value = 0.0;
  double entropy = 0.0;
  int actor_batches = 0;
  int critic_batches = 0;

  void commit(UpdateStats& stats) const {
    if (actor_batches > 0) {
      stats.policy_loss = policy / actor_batches;
      stats.entropy = entropy / actor_batches;
    }
    if (critic_batches > 0) stats.value_loss = value / critic_batches;
  }
};

// One PPO update pass over a filled rollout for a single actor/critic pair.
// Advantages arrive precomputed so the centralized-critic path can share them.
void update_actor(Mlp& actor, Adam& opt, const Rollout& roll,
                  const Vector& advantages, const TrainOptions& pass,
                  const std::vector<std::vector<int>>& epoch_order,
                  UpdateStats& stats, LossAccum& accum) {
  const int len = roll.fill;
  for (int e = 0; e < pass.epochs; ++e) {
    const std::vector<int>& order = epoch_order[e];
    for (int from = 0; from < len; from += pass.minibatch) {
      const int count = std::min(pass.minibatch, len - from);
      ActorBatch batch;
      batch.obs = take_rows(roll.obs, order, from, count);
      batch.actions = take_rows_int(roll.actions, order, from, count);
      batch.logp_old = take(roll.logp, order, from, count);
      batch.advantages = take(advantages, order, from, count);
      Vector grad = Vector::Zero(actor.param_count());
      const ActorLoss loss = actor_loss_and_grad(
          actor, batch, pass.clip_eps, pass.entropy_coef, grad);
      if (!std::isfinite(loss.total)) {
        stats.skipped += 1;
        continue;
      }
      accum.policy += loss.policy;
      accum.entropy += loss.entropy;
      accum.actor_batches += 1;
      clip_grad_norm(grad, pass.max_grad_norm);
      opt.step(actor.params(), grad);
    }
  }
}

void update_critic(Mlp& critic, Adam& opt, const Matrix& critic_obs,
                   const Vector& returns, const Vector& values_old,
                   bool clipped, const TrainOptions& pass,
                   const std::vector<std::vector<int>>& epoch_order,
                   UpdateStats& stats, LossAccum& accum) {
  const int len = static_cast<int>(returns.size());
  for (int e = 0; e < pass.epochs; ++e) {
    const std::vector<int>& order = epoch_order[e];
    for (int from = 0; from < len; from += pass.minibatch) {
      const int count = std::min(pass.minibatch, len - from);
      CriticBatch batch;
      batch.obs = take_rows(critic_obs, order, from, count);
      batch.returns = take(returns, order, from, count);
      batch.values_old = take(values_old, order, from, count);
      Vector grad = Vector::Zero(critic.param_count());
      const double loss =
          clipped ? clipped_critic_loss_and_grad(critic, batch, pass.clip_eps,
                                                 grad)
                  : critic_loss_and_grad(critic, batch, grad);
      if (!std::isfinite(loss)) {
        stats.skipped += 1;
        continue;
      }
      accum.value += loss;
      accum.critic_batches += 1;
      clip_grad_norm(grad, pass.max_grad_norm);
      opt.step(critic.params(), grad);
    }
  }
}

std::vector<std::vector<int>> draw_epoch_orders(int epochs, int len, Rng& rng) {
  std::vector<std::vector<int>> orders;
  orders.reserve(epochs);
  for (int e = 0; e < epochs; ++e) orders.push_back(shuffled_indices(len, rng));
  return orders;
}

}  // namespace

TrainResult train_ippo(const NetworkConfig& cfg, std::uint64_t seed,
                       const TrainOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  Env env(cfg, seed, /*cooperative=*/false);
  const int users = env.user_count();
  const int obs_dim = env.observation_dim();

  Rng init_rng = make_rng(seed, Stream::NetworkInit);
  std::vector<Mlp> actors, critics;
  std::vector<Adam> actor_opt, critic_opt;
  for (int m = 0; m < users; ++m) {
    Mlp actor(obs_dim, opt.hidden,
              {env.target_count(), env.power_level_count()});
    actor.init_orthogonal(init_rng, std::sqrt(2.0), {0.01, 0.01});
    Mlp critic(obs_dim, opt.hidden, {1});
    critic.init_orthogonal(init_rng, std::sqrt(2.0), {1.0});
    actor_opt.emplace_back(actor.param_count(), opt.lr);
    critic_opt.emplace_back(critic.param_count(), opt.lr);
    actors.push_back(std::move(actor));
    critics.push_back(std::move(critic));
  }

  Rng policy_rng = make_rng(seed, Stream::PolicySample);
  Rng shuffle_rng = make_rng(seed, Stream::UpdateShuffle);

  std::vector<Rollout> rolls(users);
  for (auto& r : rolls) r.init(opt.rollout_len, obs_dim);

  TrainResult result;
  UpdateStats stats;
  std::vector<StepRecord> episode_rows;
  episode_rows.reserve(static_cast<size_t>(cfg.episode_slots) * users);

  for (int ep = 0; ep < opt.episodes; ++ep) {
    Matrix obs = env.reset(ep);
    episode_rows.clear();
    bool done = false;
    while (!done) {
      IntMatrix actions(users, 2);
      for (int m = 0; m < users; ++m) {
        const ActionSample a = select_action(actors[m], obs.row(m), false,
                                             opt.force_max_power, policy_rng);
        actions(m, 0) = a.target;
        actions(m, 1) = a.power;
        Rollout& roll = rolls[m];
        roll.obs.row(roll.fill) = obs.row(m);
        roll.actions(roll.fill, 0) = a.target;
        roll.actions(roll.fill, 1) = a.power;
        roll.logp(roll.fill) = a.logp;
        roll.values(roll.fill) =
            critics[m].forward(obs.row(m))[0](0, 0);
      }
      const StepResult sr = env.step(actions);
      done = sr.done;
      for (int m = 0; m < users; ++m) {
        Rollout& roll = rolls[m];
        roll.rewards(roll.fill) = sr.rewards(m);
        roll.dones[roll.fill] = done ? 1 : 0;
        roll.fill += 1;
      }
      episode_rows.insert(episode_rows.end(), sr.records.begin(),
                          sr.records.end());
      obs = sr.next_obs;

      if (rolls[0].fill == opt.rollout_len) {
        const auto orders =
            draw_epoch_orders(opt.epochs, opt.rollout_len, shuffle_rng);
        LossAccum accum;
        for (int m = 0; m < users; ++m) {
          Rollout& roll = rolls[m];
          const double bootstrap =
              critics[m].forward(obs.row(m))[0](0, 0);
          const GaeResult gae =
              compute_gae(roll.rewards, roll.values, roll.dones, bootstrap,
                          opt.gamma, opt.gae_lambda);
          const Vector adv = normalized(gae.advantages);
          update_actor(actors[m], actor_opt[m], roll, adv, opt, orders, stats,
                       accum);
          update_critic(critics[m], critic_opt[m], roll.obs, gae.returns,
                        roll.values, /*clipped=*/false, opt, orders, stats,
                        accum);
          roll.fill = 0;
        }
        accum.commit(stats);
      }
    }
    EpisodeStats row = summarize_episode(ep, episode_rows, cfg);
    row.policy_loss = stats.policy_loss;
    row.value_loss = stats.value_loss;
    row.entropy = stats.entropy;
    result.curve.push_back(row);
  }

  result.policy.cooperative = false;
  result.policy.shared_actor = false;
  result.policy.force_max_power = opt.force_max_power;
  result.policy.hidden = opt.hidden;
  result.policy.actors = std::move(actors);
  result.policy.critics = std::move(critics);
  result.audit = env.audit();
  result.skipped_updates = stats.skipped;
  result.train_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

TrainResult train_mappo(const NetworkConfig& cfg, std::uint64_t seed,
                        const TrainOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  Env env(cfg, seed, /*cooperative=*/true);
  const int users = env.user_count();
  const int obs_dim = env.observation_dim();
  const int joint_dim = users * obs_dim;
  const int actor_count = opt.shared_actor ? 1 : users;

  Rng init_rng = make_rng(seed, Stream::NetworkInit);
  std::vector<Mlp> actors;
  std::vector<Adam> actor_opt;
  for (int i = 0; i < actor_count; ++i) {
    Mlp actor(obs_dim, opt.hidden,
              {env.target_count(), env.power_level_count()});
    actor.init_orthogonal(init_rng, std::sqrt(2.0), {0.01, 0.01});
    actor_opt.emplace_back(actor.param_count(), opt.lr);
    actors.push_back(std::move(actor));
  }
  Mlp critic(joint_dim, opt.hidden, {1});
  critic.init_orthogonal(init_rng, std::sqrt(2.0), {1.0});
  Adam critic_opt(critic.param_count(), opt.lr);

  Rng policy_rng = make_rng(seed, Stream::PolicySample);
  Rng shuffle_rng = make_rng(seed, Stream::UpdateShuffle);

  // Per-user action streams plus one shared team stream for the critic.
  std::vector<Rollout> rolls(users);
  for (auto& r : rolls) r.init(opt.rollout_len, obs_dim);
  Matrix joint_obs(opt.rollout_len, joint_dim);
  Vector team_rewards(opt.rollout_len), team_values(opt.rollout_len);
  std::vector<std::uint8_t> team_dones(opt.rollout_len, 0);
  int fill = 0;

  auto stack_obs = [&](const Matrix& obs) {
    Matrix row(1, joint_dim);
    for (int m = 0; m < users; ++m)
      row.block(0, m * obs_dim, 1, obs_dim) = obs.row(m);
    return row;
  };

  TrainResult result;
  UpdateStats stats;
  std::vector<StepRecord> episode_rows;

  for (int ep = 0; ep < opt.episodes; ++ep) {
    Matrix obs = env.reset(ep);
    episode_rows.clear();
    bool done = false;
    while (!done) {
      const Matrix joint_row = stack_obs(obs);
      const double value = critic.forward(joint_row)[0](0, 0);
      IntMatrix actions(users, 2);
      for (int m = 0; m < users; ++m) {
        Mlp& actor = actors[opt.shared_actor ? 0 : m];
        const ActionSample a = select_action(actor, obs.row(m), false,
                                             opt.force_max_power, policy_rng);
        actions(m, 0) = a.target;
        actions(m, 1) = a.power;
        Rollout& roll = rolls[m];
        roll.obs.row(fill) = obs.row(m);
        roll.actions(fill, 0) = a.target;
        roll.actions(fill, 1) = a.power;
        roll.logp(fill) = a.logp;
      }
      const StepResult sr = env.step(actions);
      done = sr.done;
      joint_obs.row(fill) = joint_row;
      team_rewards(fill) = sr.rewards(0);  // identical across the team
      team_values(fill) = value;
      team_dones[fill] = done ? 1 : 0;
      fill += 1;
      episode_rows.insert(episode_rows.end(), sr.records.begin(),
                          sr.records.end());
      obs = sr.next_obs;

      if (fill == opt.rollout_len) {
        const double bootstrap = critic.forward(stack_obs(obs))[0](0, 0);
        const GaeResult gae = compute_gae(team_rewards, team_values, team_dones,
                                          bootstrap, opt.gamma, opt.gae_lambda);
        const Vector adv = normalized(gae.advantages);
        const auto orders =
            draw_epoch_orders(opt.epochs, opt.rollout_len, shuffle_rng);
        LossAccum accum;
        for (int m = 0; m < users; ++m) {
          Rollout& roll = rolls[m];
          roll.fill = fill;
          update_actor(actors[opt.shared_actor ? 0 : m],
                       actor_opt[opt.shared_actor ? 0 : m], roll, adv, opt,
                       orders, stats, accum);
        }
        update_critic(critic, critic_opt, joint_obs, gae.returns, team_values,
                      /*clipped=*/true, opt, orders, stats, accum);
        accum.commit(stats);
        fill = 0;
        for (auto& r : rolls) r.fill = 0;
      }
    }
    EpisodeStats row = summarize_episode(ep, episode_rows, cfg);
    row.policy_loss = stats.policy_loss;
    row.value_loss = stats.value_loss;
    row.entropy = stats.entropy;
    result.curve.push_back(row);
  }

  result.policy.cooperative = true;
  result.policy.shared_actor = opt.shared_actor;
  result.policy.force_max_power = opt.force_max_power;
  result.policy.hidden = opt.hidden;
  result.policy.actors = std::move(actors);
  result.policy.critics.push_back(std::move(critic));
  result.audit = env.audit();
  result.skipped_updates = stats.skipped;
  result.train_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

EvalResult evaluate_policy(const NetworkConfig& cfg, const PolicyBundle& policy,
                           std::uint64_t seed, int episodes, bool greedy,
                           bool record_steps) {
  Env env(cfg, seed, policy.cooperative);
  const int users = env.user_count();
  Rng policy_rng = make_rng(seed, Stream::PolicySample);
  EvalResult out;
  std::vector<StepRecord> episode_rows;
  for (int ep = 0; ep < episodes; ++ep) {
    Matrix obs = env.reset(ep);
    episode_rows.clear();
    bool done = false;
    while (!done) {
      IntMatrix actions(users, 2);
      for (int m = 0; m < users; ++m) {
        const Mlp& actor =
            policy.actors[policy.shared_actor ? 0 : m];
        const ActionSample a = select_action(actor, obs.row(m), greedy,
                                             policy.force_max_power,
                                             policy_rng);
        actions(m, 0) = a.target;
        actions(m, 1) = a.power;
      }
      const StepResult sr = env.step(actions);
      done = sr.done;
      episode_rows.insert(episode_rows.end(), sr.records.begin(),
                          sr.records.end());
      obs = sr.next_obs;
    }
    out.curve.push_back(summarize_episode(ep, episode_rows, cfg));
    if (record_steps)
      out.records.insert(out.records.end(), episode_rows.begin(),
                         episode_rows.end());
  }
  out.audit = env.audit();
  return out;
}

}  // namespace ucmec

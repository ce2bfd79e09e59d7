#ifndef UCMEC_TRAINER_HPP
#define UCMEC_TRAINER_HPP

#include <cstdint>
#include <vector>

#include "ucmec/env.hpp"
#include "ucmec/metrics.hpp"
#include "ucmec/mlp.hpp"
#include "ucmec/ppo.hpp"

namespace ucmec {

struct TrainOptions {
  int episodes = 1000;
  double gamma = 0.99;
  double gae_lambda = 0.95;
  double clip_eps = 0.2;
  double entropy_coef = 0.01;
  double lr = 5e-4;
  double max_grad_norm = 0.5;
  int rollout_len = 2048;  // steps per agent between updates
  int minibatch = 64;
  int epochs = 10;
  std::vector<int> hidden = {64, 64};
  bool shared_actor = false;     // centralized-critic mode: one actor for all
  bool force_max_power = false;  // pin the power head to the top level
};

// Trained networks plus enough structure to rebuild them from a checkpoint.
struct PolicyBundle {
  bool cooperative = false;
  bool shared_actor = false;
  bool force_max_power = false;
  std::vector<int> hidden;
  std::vector<Mlp> actors;   // one per user, or one shared
  std::vector<Mlp> critics;  // one per user, or one centralized
};

struct TrainResult {
  std::vector<EpisodeStats> curve;
  PolicyBundle policy;
  AuditCounters audit;
  double train_seconds = 0.0;
  int skipped_updates = 0;  // minibatches dropped on a non-finite loss
};

// Independent learners: each user trains its own actor and critic on local
// observations and its own reward.
TrainResult train_ippo(const NetworkConfig& cfg, std::uint64_t seed,
                       const TrainOptions& opt);

// Centralized critic on the stacked observation, per-user (or shared) actors,
// one team reward.
TrainResult train_mappo(const NetworkConfig& cfg, std::uint64_t seed,
                        const TrainOptions& opt);

struct EvalResult {
  std::vector<EpisodeStats> curve;
  std::vector<StepRecord> records;
  AuditCounters audit;
};

// Runs the bundle without learning. Greedy takes the argmax action;
// otherwise actions are sampled from the policy.
EvalResult evaluate_policy(const NetworkConfig& cfg, const PolicyBundle& policy,
                           std::uint64_t seed, int episodes, bool greedy,
                           bool record_steps);

}  // namespace ucmec

#endif

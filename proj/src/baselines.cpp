#include "ucmec/baselines.hpp"

#include "ucmec/seeding.hpp"

namespace ucmec {

EvalResult run_baseline(const NetworkConfig& cfg, BaselineKind kind,
                        std::uint64_t seed, int episodes, bool record_steps) {
  Env env(cfg, seed, /*cooperative=*/false);
  const int users = env.user_count();
  Rng rng = make_rng(seed, Stream::PolicySample);
  EvalResult out;
  std::vector<StepRecord> episode_rows;
  for (int ep = 0; ep < episodes; ++ep) {
    env.reset(ep);
    episode_rows.clear();
    bool done = false;
    while (!done) {
      IntMatrix actions = IntMatrix::Zero(users, 2);
      if (kind == BaselineKind::Random) {
        for (int m = 0; m < users; ++m) {
          actions(m, 0) =
              static_cast<int>(uniform_below(rng, env.target_count()));
          actions(m, 1) =
              static_cast<int>(uniform_below(rng, env.power_level_count()));
        }
      }
      const StepResult sr = env.step(actions);
      done = sr.done;
      episode_rows.insert(episode_rows.end(), sr.records.begin(),
                          sr.records.end());
    }
    out.curve.push_back(summarize_episode(ep, episode_rows, cfg));
    if (record_steps)
      out.records.insert(out.records.end(), episode_rows.begin(),
                         episode_rows.end());
  }
  out.audit = env.audit();
  return out;
}

NetworkConfig cellular_variant(NetworkConfig cfg) {
  cfg.cellular_mode = true;
  return cfg;
}

}  // namespace ucmec

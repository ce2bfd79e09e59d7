#ifndef UCMEC_HARNESS_HPP
#define UCMEC_HARNESS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "ucmec/baselines.hpp"
#include "ucmec/config.hpp"
#include "ucmec/trainer.hpp"

namespace ucmec {

// Experiment-level policy selector. The first four train through the PPO
// stack (cbo on the cellular env variant, mpo with the power head pinned);
// the last two are evaluation-only floors.
enum class Mode { Ippo, Mappo, Cbo, Mpo, Random, LocalOnly };

Mode parse_mode(const std::string& name);
std::string mode_name(Mode mode);
bool mode_is_learned(Mode mode);

// One experiment: a scenario run for every (sweep value, seed) pair.
struct ExperimentSpec {
  std::string scenario = "default";
  NetworkConfig config;
  TrainOptions train;
  Mode mode = Mode::Ippo;
  std::vector<std::uint64_t> seeds = {1};
  std::string sweep_axis;            // empty = single point
  std::vector<double> sweep_values;  // values along the axis
  int eval_episodes = 20;
  bool record_steps = false;

  void validate() const;
};

ExperimentSpec experiment_spec_from_json(const std::string& text);
ExperimentSpec load_experiment_spec(const std::string& path);
std::string experiment_spec_to_json(const ExperimentSpec& spec);

// axis in {users, aps, max_power, cluster_size}; integer axes reject
// fractional values.
NetworkConfig apply_sweep_value(const NetworkConfig& base,
                                const std::string& axis, double value);
std::string sweep_point_label(const std::string& axis, double value);

// Explicit argument, else UCMEC_OUT_ROOT, else "runs".
std::string resolve_out_root(const std::string& cli_out);

// Weight checkpoints as structured text.
std::string policy_to_json(const PolicyBundle& policy);
PolicyBundle policy_from_json(const std::string& text);
void save_policy(const std::string& path, const PolicyBundle& policy);
PolicyBundle load_policy(const std::string& path);

struct RunOutcome {
  std::string point;
  std::uint64_t seed = 0;
  std::string run_dir;
  std::vector<EpisodeStats> eval_curve;
  AuditCounters audit;      // training plus evaluation
  int skipped_updates = 0;  // non-finite losses hit during training
  double train_seconds = 0.0;
};

// Trains (or only evaluates, for the floor modes) one (point, seed) cell and
// writes its run directory: config snapshot, provenance, metrics CSV, and for
// learned modes the training curve and checkpoint. Byte-deterministic for
// fixed inputs.
RunOutcome execute_run(const ExperimentSpec& spec, const NetworkConfig& cfg,
                       const std::string& point, std::uint64_t seed,
                       const std::string& run_dir);

// Runs every (point, seed) cell, up to `workers` in parallel, writes one
// aggregate JSON per (point, mode), then refreshes the plot data under
// <out_root>/plots. Returns the scenario directory. Throws on invalid
// config, non-finite training losses, or I/O failure.
std::string run_experiment(const ExperimentSpec& spec,
                           const std::string& out_root, int workers);

// Evaluates a saved checkpoint (or, with an empty path, the floor modes)
// across the spec's points and seeds; writes "<mode>_eval" run dirs.
std::string run_evaluation(const ExperimentSpec& spec,
                           const std::string& out_root,
                           const std::string& checkpoint_path, int workers);

// Scans a result root and writes tidy per-figure CSVs (x, series, mean, std)
// plus a self-contained plotting script under <root>/plots. Missing or
// partial runs only warn. Returns the number of data files written.
int emit_plots(const std::string& result_root);

}  // namespace ucmec

#endif

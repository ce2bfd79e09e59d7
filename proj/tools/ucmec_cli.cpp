#include <cstdint>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ucmec/harness.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string mode;
  std::vector<std::uint64_t> seeds;
  std::string out;
  int workers = 1;
};

ucmec::ExperimentSpec build_spec(const CommonArgs& args) {
  ucmec::ExperimentSpec spec;
  if (!args.config_path.empty())
    spec = ucmec::load_experiment_spec(args.config_path);
  if (!args.mode.empty()) spec.mode = ucmec::parse_mode(args.mode);
  if (!args.seeds.empty()) spec.seeds = args.seeds;
  return spec;
}

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "experiment spec JSON file");
  cmd->add_option("--mode", args.mode,
                  "ippo|mappo|cbo|mpo|random|local_only");
  cmd->add_option("--seeds", args.seeds, "master seeds, comma separated")
      ->delimiter(',');
  cmd->add_option("--out", args.out,
                  "output root (default $UCMEC_OUT_ROOT, else ./runs)");
  cmd->add_option("--workers", args.workers, "parallel runs within a sweep")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"user-centric edge offloading simulator and trainer"};
  app.require_subcommand(1);

  CommonArgs train_args, eval_args, sweep_args;
  std::string checkpoint;
  int eval_episodes = 0;
  std::string sweep_axis;
  std::vector<double> sweep_values;
  std::string plot_root;

  CLI::App* train =
      app.add_subcommand("train", "train and evaluate one scenario");
  add_common(train, train_args);

  CLI::App* evaluate = app.add_subcommand(
      "evaluate", "evaluate a checkpoint or a non-learned policy");
  add_common(evaluate, eval_args);
  evaluate->add_option("--checkpoint", checkpoint, "policy checkpoint JSON");
  evaluate->add_option("--episodes", eval_episodes, "evaluation episodes")
      ->check(CLI::PositiveNumber);

  CLI::App* sweep = app.add_subcommand("sweep", "run a parameter sweep");
  add_common(sweep, sweep_args);
  sweep->add_option("--sweep-axis", sweep_axis,
                    "users|aps|max_power|cluster_size");
  sweep->add_option("--sweep-values", sweep_values,
                    "axis values, comma separated")
      ->delimiter(',');

  CLI::App* plot =
      app.add_subcommand("plot", "emit plot data for completed runs");
  plot->add_option("--out", plot_root, "result root to scan");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      ucmec::ExperimentSpec spec = build_spec(train_args);
      if (!spec.sweep_axis.empty())
        throw std::invalid_argument(
            "spec declares a sweep; use the sweep subcommand");
      std::cout << ucmec::run_experiment(
                       spec, ucmec::resolve_out_root(train_args.out),
                       train_args.workers)
                << "\n";
    } else if (evaluate->parsed()) {
      ucmec::ExperimentSpec spec = build_spec(eval_args);
      if (eval_episodes > 0) spec.eval_episodes = eval_episodes;
      std::cout << ucmec::run_evaluation(
                       spec, ucmec::resolve_out_root(eval_args.out),
                       checkpoint, eval_args.workers)
                << "\n";
    } else if (sweep->parsed()) {
      ucmec::ExperimentSpec spec = build_spec(sweep_args);
      if (!sweep_axis.empty()) spec.sweep_axis = sweep_axis;
      if (!sweep_values.empty()) spec.sweep_values = sweep_values;
      if (spec.sweep_axis.empty())
        throw std::invalid_argument(
            "sweep needs --sweep-axis and --sweep-values");
      std::cout << ucmec::run_experiment(
                       spec, ucmec::resolve_out_root(sweep_args.out),
                       sweep_args.workers)
                << "\n";
    } else if (plot->parsed()) {
      const int files =
          ucmec::emit_plots(ucmec::resolve_out_root(plot_root));
      std::cout << files << " plot data files\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

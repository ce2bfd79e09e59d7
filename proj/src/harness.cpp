#include "ucmec/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "ucmec/metrics.hpp"

namespace fs = std::filesystem;

namespace ucmec {

using nlohmann::json;

namespace {

// Keeps evaluation episodes on a different stream family than training.
constexpr std::uint64_t kEvalSeedSalt = 0x5851f42d4c957f2dULL;

std::uint64_t eval_seed(std::uint64_t seed) { return seed ^ kEvalSeedSalt; }

[[noreturn]] void fail(const std::string& what) {
  throw std::invalid_argument("invalid experiment spec: " + what);
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(v));
  return buf;
}

json train_options_to_json(const TrainOptions& t) {
  json j;
  j["episodes"] = t.episodes;
  j["gamma"] = t.gamma;
  j["gae_lambda"] = t.gae_lambda;
  j["clip_eps"] = t.clip_eps;
  j["entropy_coef"] = t.entropy_coef;
  j["lr"] = t.lr;
  j["max_grad_norm"] = t.max_grad_norm;
  j["rollout_len"] = t.rollout_len;
  j["minibatch"] = t.minibatch;
  j["epochs"] = t.epochs;
  j["hidden"] = t.hidden;
  j["shared_actor"] = t.shared_actor;
  j["force_max_power"] = t.force_max_power;
  return j;
}

TrainOptions train_options_from_json(const json& j) {
  TrainOptions t;
  const std::set<std::string> known = {
      "episodes",  "gamma",     "gae_lambda",   "clip_eps",
      "entropy_coef", "lr",     "max_grad_norm", "rollout_len",
      "minibatch", "epochs",    "hidden",       "shared_actor",
      "force_max_power"};
  for (const auto& item : j.items())
    if (!known.count(item.key())) fail("unknown train key: " + item.key());
  if (j.contains("episodes")) t.episodes = j.at("episodes").get<int>();
  if (j.contains("gamma")) t.gamma = j.at("gamma").get<double>();
  if (j.contains("gae_lambda")) t.gae_lambda = j.at("gae_lambda").get<double>();
  if (j.contains("clip_eps")) t.clip_eps = j.at("clip_eps").get<double>();
  if (j.contains("entropy_coef"))
    t.entropy_coef = j.at("entropy_coef").get<double>();
  if (j.contains("lr")) t.lr = j.at("lr").get<double>();
  if (j.contains("max_grad_norm"))
    t.max_grad_norm = j.at("max_grad_norm").get<double>();
  if (j.contains("rollout_len")) t.rollout_len = j.at("rollout_len").get<int>();
  if (j.contains("minibatch")) t.minibatch = j.at("minibatch").get<int>();
  if (j.contains("epochs")) t.epochs = j.at("epochs").get<int>();
  if (j.contains("hidden")) t.hidden = j.at("hidden").get<std::vector<int>>();
  if (j.contains("shared_actor"))
    t.shared_actor = j.at("shared_actor").get<bool>();
  if (j.contains("force_max_power"))
    t.force_max_power = j.at("force_max_power").get<bool>();
  return t;
}

void check_config_keys(const json& j) {
  const json known = json::parse(network_config_to_json(NetworkConfig{}));
  for (const auto& item : j.items()) {
    if (known.contains(item.key())) continue;
    if (item.key() == "user_positions" || item.key() == "ap_positions" ||
        item.key() == "power_levels_w")
      continue;
    fail("unknown config key: " + item.key());
  }
}

bool integral_axis(const std::string& axis) {
  return axis == "users" || axis == "aps" || axis == "cluster_size";
}

double mean_of(const std::vector<EpisodeStats>& curve,
               double EpisodeStats::*field) {
  if (curve.empty()) return 0.0;
  double acc = 0.0;
  for (const EpisodeStats& s : curve) acc += s.*field;
  return acc / static_cast<double>(curve.size());
}

AuditCounters merge_audit(const AuditCounters& a, const AuditCounters& b) {
  AuditCounters out = a;
  out.slots += b.slots;
  out.target_range += b.target_range;
  out.power_range += b.power_range;
  out.power_budget += b.power_budget;
  out.cluster_width += b.cluster_width;
  out.deadline += b.deadline;
  out.capacity += b.capacity;
  return out;
}

json mlp_to_json(const Mlp& net) {
  json j;
  j["input_dim"] = net.input_dim();
  std::vector<int> heads;
  for (int h = 0; h < net.head_count(); ++h) heads.push_back(net.head_dim(h));
  j["heads"] = heads;
  std::vector<double> params(net.params().data(),
                             net.params().data() + net.param_count());
  j["params"] = params;
  return j;
}

Mlp mlp_from_json(const json& j, const std::vector<int>& hidden) {
  const int input = j.at("input_dim").get<int>();
  const auto heads = j.at("heads").get<std::vector<int>>();
  Mlp net(input, hidden, heads);
  const auto params = j.at("params").get<std::vector<double>>();
  if (static_cast<int>(params.size()) != net.param_count())
    throw std::runtime_error("checkpoint parameter count mismatch");
  for (int i = 0; i < net.param_count(); ++i) net.params()(i) = params[i];
  return net;
}

struct Job {
  std::string point;
  NetworkConfig cfg;
  std::uint64_t seed = 0;
  std::string run_dir;
};

// (point, cfg) cells in sweep order; "base" when there is no sweep.
std::vector<std::pair<std::string, NetworkConfig>> resolve_points(
    const ExperimentSpec& spec) {
  std::vector<std::pair<std::string, NetworkConfig>> points;
  if (spec.sweep_axis.empty()) {
    points.emplace_back("base", spec.config);
  } else {
    for (double v : spec.sweep_values)
      points.emplace_back(sweep_point_label(spec.sweep_axis, v),
                          apply_sweep_value(spec.config, spec.sweep_axis, v));
  }
  for (auto& [label, cfg] : points) {
    try {
      cfg.validate();
    } catch (const std::exception& e) {
      throw std::invalid_argument(std::string(e.what()) + " (at point " +
                                  label + ")");
    }
  }
  return points;
}

void run_jobs(const ExperimentSpec& spec, const std::vector<Job>& jobs,
              int workers, std::vector<RunOutcome>& outcomes) {
  outcomes.resize(jobs.size());
  const int n = static_cast<int>(jobs.size());
  const int pool = std::max(1, std::min(workers, n));
  std::atomic<int> next{0};
  std::mutex err_mutex;
  std::vector<std::string> errors;
  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= n) return;
      try {
        outcomes[i] = execute_run(spec, jobs[i].cfg, jobs[i].point,
                                  jobs[i].seed, jobs[i].run_dir);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(err_mutex);
        errors.push_back(jobs[i].run_dir + ": " + e.what());
      }
    }
  };
  if (pool == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (int t = 0; t < pool; ++t) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
  }
  if (!errors.empty()) {
    std::sort(errors.begin(), errors.end());
    std::string msg = "run failures:";
    for (const std::string& e : errors) msg += "\n  " + e;
    throw std::runtime_error(msg);
  }
}

void write_point_aggregates(
    const ExperimentSpec& spec, const std::string& scenario_dir,
    const std::string& mode_dir_name,
    const std::vector<std::pair<std::string, NetworkConfig>>& points,
    const std::vector<RunOutcome>& outcomes) {
  const int seeds = static_cast<int>(spec.seeds.size());
  for (int p = 0; p < static_cast<int>(points.size()); ++p) {
    json agg;
    agg["schema_version"] = 1;
    agg["scenario"] = spec.scenario;
    agg["mode"] = mode_name(spec.mode);
    agg["axis"] = spec.sweep_axis;
    if (spec.sweep_axis.empty())
      agg["value"] = nullptr;
    else
      agg["value"] = spec.sweep_values[p];
    agg["point"] = points[p].first;
    agg["seeds"] = spec.seeds;
    agg["eval_episodes"] = spec.eval_episodes;

    const std::pair<const char*, double EpisodeStats::*> fields[] = {
        {"metric", &EpisodeStats::metric},
        {"mean_reward", &EpisodeStats::mean_reward},
        {"mean_delay_s", &EpisodeStats::mean_delay_s},
        {"mean_rate_bps", &EpisodeStats::mean_rate_bps},
        {"drop_rate", &EpisodeStats::drop_rate},
    };
    json metrics;
    std::int64_t violations = 0;
    for (const auto& [name, field] : fields) {
      std::vector<double> per_seed;
      for (int s = 0; s < seeds; ++s) {
        const RunOutcome& o = outcomes[p * seeds + s];
        per_seed.push_back(mean_of(o.eval_curve, field));
      }
      const Aggregate a = aggregate(per_seed);
      json entry;
      entry["mean"] = a.mean;
      entry["std"] = a.stddev;
      entry["per_seed"] = per_seed;
      metrics[name] = entry;
    }
    for (int s = 0; s < seeds; ++s)
      violations += outcomes[p * seeds + s].audit.total_violations();
    agg["metrics"] = metrics;
    agg["audit_violations"] = violations;

    const fs::path dir =
        fs::path(scenario_dir) / points[p].first / mode_dir_name;
    fs::create_directories(dir);
    write_text_file((dir / "aggregate.json").string(), agg.dump(2) + "\n");
  }
}

// ---------------------------------------------------------------------------
// Plot emission

struct AggRecord {
  std::string scenario;
  std::string point;
  std::string mode;
  std::string axis;
  double value = 0.0;
  bool has_value = false;
  json metrics;
};

std::vector<std::string> sorted_subdirs(const fs::path& dir) {
  std::vector<std::string> names;
  if (!fs::is_directory(dir)) return names;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.is_directory()) names.push_back(entry.path().filename().string());
  std::sort(names.begin(), names.end());
  return names;
}

std::vector<AggRecord> collect_aggregates(const std::string& root) {
  std::vector<AggRecord> records;
  for (const std::string& scenario : sorted_subdirs(root)) {
    if (scenario == "plots") continue;
    const fs::path scen_dir = fs::path(root) / scenario;
    for (const std::string& point : sorted_subdirs(scen_dir)) {
      const fs::path point_dir = scen_dir / point;
      for (const std::string& mode : sorted_subdirs(point_dir)) {
        const fs::path file = point_dir / mode / "aggregate.json";
        if (!fs::is_regular_file(file)) continue;
        json j;
        try {
          j = json::parse(read_text_file(file.string()));
        } catch (const std::exception& e) {
          std::cerr << "warning: skipping unreadable " << file.string() << ": "
                    << e.what() << "\n";
          continue;
        }
        AggRecord r;
        r.scenario = scenario;
        r.point = point;
        r.mode = mode;
        r.axis = j.value("axis", std::string());
        if (j.contains("value") && !j.at("value").is_null()) {
          r.value = j.at("value").get<double>();
          r.has_value = true;
        }
        r.metrics = j.value("metrics", json::object());
        records.push_back(r);
      }
    }
  }
  return records;
}

const char* kPlotScript = R"PY(#!/usr/bin/env python3
"""Renders every plot-data CSV sitting next to this script.

Sweep files  (*_vs_*.csv):       x, series, mean, std -> errorbar plot
Curve files  (*_training_*.csv): episode, series, mean, std -> line + band
"""
import csv
import os
import sys
from collections import defaultdict

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit("matplotlib is required: pip install matplotlib")

HERE = os.path.dirname(os.path.abspath(__file__))


def load(path):
    series = defaultdict(list)
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        xkey = reader.fieldnames[0]
        for row in reader:
            series[row["series"]].append(
                (float(row[xkey]), float(row["mean"]), float(row["std"])))
    return xkey, series


def render(path):
    xkey, series = load(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    for name in sorted(series):
        pts = sorted(series[name])
        xs = [p[0] for p in pts]
        means = [p[1] for p in pts]
        stds = [p[2] for p in pts]
        if xkey == "episode":
            ax.plot(xs, means, label=name)
            ax.fill_between(xs, [m - s for m, s in zip(means, stds)],
                            [m + s for m, s in zip(means, stds)], alpha=0.2)
        else:
            ax.errorbar(xs, means, yerr=stds, marker="o", capsize=3,
                        label=name)
    ax.set_xlabel(xkey)
    ax.set_ylabel(os.path.basename(path).rsplit(".", 1)[0])
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    out = path.rsplit(".", 1)[0] + ".png"
    fig.savefig(out, dpi=150)
    plt.close(fig)
    print("wrote", out)


def main():
    csvs = [os.path.join(HERE, f) for f in sorted(os.listdir(HERE))
            if f.endswith(".csv")]
    if not csvs:
        print("no plot data found next to this script")
        return
    for path in csvs:
        render(path)


if __name__ == "__main__":
    main()
)PY";

}  // namespace

Mode parse_mode(const std::string& name) {
  if (name == "ippo") return Mode::Ippo;
  if (name == "mappo") return Mode::Mappo;
  if (name == "cbo") return Mode::Cbo;
  if (name == "mpo") return Mode::Mpo;
  if (name == "random") return Mode::Random;
  if (name == "local_only") return Mode::LocalOnly;
  fail("unknown mode: " + name +
       " (expected ippo|mappo|cbo|mpo|random|local_only)");
}

std::string mode_name(Mode mode) {
  switch (mode) {
    case Mode::Ippo: return "ippo";
    case Mode::Mappo: return "mappo";
    case Mode::Cbo: return "cbo";
    case Mode::Mpo: return "mpo";
    case Mode::Random: return "random";
    case Mode::LocalOnly: return "local_only";
  }
  return "unknown";
}

bool mode_is_learned(Mode mode) {
  return mode == Mode::Ippo || mode == Mode::Mappo || mode == Mode::Cbo ||
         mode == Mode::Mpo;
}

void ExperimentSpec::validate() const {
  if (scenario.empty()) fail("scenario must be non-empty");
  if (scenario.find('/') != std::string::npos ||
      scenario.find('\\') != std::string::npos)
    fail("scenario must not contain path separators");
  if (seeds.empty()) fail("seeds must be non-empty");
  std::set<std::uint64_t> unique(seeds.begin(), seeds.end());
  if (unique.size() != seeds.size()) fail("seeds must be distinct");
  if (eval_episodes < 1) fail("eval_episodes must be >= 1");
  if (sweep_axis.empty() != sweep_values.empty())
    fail("sweep axis and values must be given together");
  if (!sweep_axis.empty()) {
    if (sweep_axis != "users" && sweep_axis != "aps" &&
        sweep_axis != "max_power" && sweep_axis != "cluster_size")
      fail("sweep axis must be users|aps|max_power|cluster_size");
    for (double v : sweep_values) {
      if (!(v > 0)) fail("sweep values must be positive");
      if (integral_axis(sweep_axis) && v != std::floor(v))
        fail("sweep values for " + sweep_axis + " must be integers");
    }
    std::set<double> distinct(sweep_values.begin(), sweep_values.end());
    if (distinct.size() != sweep_values.size())
      fail("sweep values must be distinct");
  }
  config.validate();
  if (train.episodes < 0) fail("train.episodes must be >= 0");
  if (train.rollout_len < 1) fail("train.rollout_len must be >= 1");
  if (train.minibatch < 1) fail("train.minibatch must be >= 1");
  if (train.epochs < 1) fail("train.epochs must be >= 1");
}

ExperimentSpec experiment_spec_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(std::string("JSON parse error: ") + e.what());
  }
  if (!j.is_object()) fail("top level must be a JSON object");
  const std::set<std::string> known = {"scenario", "mode",          "seeds",
                                       "config",   "train",         "sweep",
                                       "eval_episodes", "record_steps"};
  for (const auto& item : j.items())
    if (!known.count(item.key())) fail("unknown key: " + item.key());

  ExperimentSpec spec;
  if (j.contains("scenario")) spec.scenario = j.at("scenario").get<std::string>();
  if (j.contains("mode")) spec.mode = parse_mode(j.at("mode").get<std::string>());
  if (j.contains("seeds"))
    spec.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("config")) {
    check_config_keys(j.at("config"));
    spec.config = network_config_from_json(j.at("config").dump());
  }
  if (j.contains("train")) spec.train = train_options_from_json(j.at("train"));
  if (j.contains("sweep")) {
    const json& sw = j.at("sweep");
    for (const auto& item : sw.items())
      if (item.key() != "axis" && item.key() != "values")
        fail("unknown sweep key: " + item.key());
    spec.sweep_axis = sw.value("axis", std::string());
    if (sw.contains("values"))
      spec.sweep_values = sw.at("values").get<std::vector<double>>();
  }
  if (j.contains("eval_episodes"))
    spec.eval_episodes = j.at("eval_episodes").get<int>();
  if (j.contains("record_steps"))
    spec.record_steps = j.at("record_steps").get<bool>();
  spec.validate();
  return spec;
}

ExperimentSpec load_experiment_spec(const std::string& path) {
  return experiment_spec_from_json(read_text_file(path));
}

std::string experiment_spec_to_json(const ExperimentSpec& spec) {
  json j;
  j["scenario"] = spec.scenario;
  j["mode"] = mode_name(spec.mode);
  j["seeds"] = spec.seeds;
  j["config"] = json::parse(network_config_to_json(spec.config));
  j["train"] = train_options_to_json(spec.train);
  if (!spec.sweep_axis.empty()) {
    json sw;
    sw["axis"] = spec.sweep_axis;
    sw["values"] = spec.sweep_values;
    j["sweep"] = sw;
  }
  j["eval_episodes"] = spec.eval_episodes;
  j["record_steps"] = spec.record_steps;
  return j.dump(2);
}

NetworkConfig apply_sweep_value(const NetworkConfig& base,
                                const std::string& axis, double value) {
  NetworkConfig cfg = base;
  if (axis == "users") {
    cfg.user_count = static_cast<int>(value);
    cfg.user_positions.clear();
  } else if (axis == "aps") {
    cfg.ap_count = static_cast<int>(value);
    cfg.ap_positions.clear();
  } else if (axis == "max_power") {
    cfg.max_power_w = value;
    cfg.power_levels_w.clear();
  } else if (axis == "cluster_size") {
    cfg.cluster_size = static_cast<int>(value);
  } else {
    fail("unknown sweep axis: " + axis);
  }
  return cfg;
}

std::string sweep_point_label(const std::string& axis, double value) {
  if (integral_axis(axis)) {
    std::ostringstream ss;
    ss << axis << '_' << static_cast<long long>(value);
    return ss.str();
  }
  return axis + "_" + format_double(value);
}

std::string resolve_out_root(const std::string& cli_out) {
  if (!cli_out.empty()) return cli_out;
  const char* env = std::getenv("UCMEC_OUT_ROOT");
  if (env != nullptr && *env != '\0') return env;
  return "runs";
}

std::string policy_to_json(const PolicyBundle& policy) {
  json j;
  j["format"] = "ucmec-policy";
  j["schema_version"] = 1;
  j["cooperative"] = policy.cooperative;
  j["shared_actor"] = policy.shared_actor;
  j["force_max_power"] = policy.force_max_power;
  j["hidden"] = policy.hidden;
  json actors = json::array();
  for (const Mlp& net : policy.actors) actors.push_back(mlp_to_json(net));
  json critics = json::array();
  for (const Mlp& net : policy.critics) critics.push_back(mlp_to_json(net));
  j["actors"] = actors;
  j["critics"] = critics;
  return j.dump();
}

PolicyBundle policy_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("bad checkpoint: ") + e.what());
  }
  if (j.value("format", std::string()) != "ucmec-policy")
    throw std::runtime_error("bad checkpoint: unrecognized format field");
  PolicyBundle p;
  p.cooperative = j.at("cooperative").get<bool>();
  p.shared_actor = j.at("shared_actor").get<bool>();
  p.force_max_power = j.at("force_max_power").get<bool>();
  p.hidden = j.at("hidden").get<std::vector<int>>();
  for (const json& net : j.at("actors"))
    p.actors.push_back(mlp_from_json(net, p.hidden));
  for (const json& net : j.at("critics"))
    p.critics.push_back(mlp_from_json(net, p.hidden));
  return p;
}

void save_policy(const std::string& path, const PolicyBundle& policy) {
  write_text_file(path, policy_to_json(policy) + "\n");
}

PolicyBundle load_policy(const std::string& path) {
  return policy_from_json(read_text_file(path));
}

RunOutcome execute_run(const ExperimentSpec& spec, const NetworkConfig& cfg,
                       const std::string& point, std::uint64_t seed,
                       const std::string& run_dir) {
  const NetworkConfig run_cfg =
      spec.mode == Mode::Cbo ? cellular_variant(cfg) : cfg;
  TrainOptions train = spec.train;
  if (spec.mode == Mode::Mpo) train.force_max_power = true;

  fs::create_directories(run_dir);
  const std::string cfg_json = network_config_to_json(run_cfg);
  {
    json snapshot;
    snapshot["schema_version"] = 1;
    snapshot["scenario"] = spec.scenario;
    snapshot["point"] = point;
    snapshot["mode"] = mode_name(spec.mode);
    snapshot["seed"] = seed;
    snapshot["eval_episodes"] = spec.eval_episodes;
    snapshot["config"] = json::parse(cfg_json);
    snapshot["train"] = train_options_to_json(train);
    write_text_file((fs::path(run_dir) / "config.json").string(),
                    snapshot.dump(2) + "\n");
  }
  {
    const std::string train_json = train_options_to_json(train).dump();
    std::ostringstream prov;
    prov << "ucmec run\n"
         << "schema_version 1\n"
         << "scenario " << spec.scenario << "\n"
         << "point " << point << "\n"
         << "mode " << mode_name(spec.mode) << "\n"
         << "seed " << seed << "\n"
         << "eval_seed " << eval_seed(seed) << "\n"
         << "config_fnv1a " << hex64(fnv1a(cfg_json)) << "\n"
         << "train_fnv1a " << hex64(fnv1a(train_json)) << "\n";
    write_text_file((fs::path(run_dir) / "provenance.txt").string(),
                    prov.str());
  }

  RunOutcome out;
  out.point = point;
  out.seed = seed;
  out.run_dir = run_dir;

  EvalResult eval;
  if (mode_is_learned(spec.mode)) {
    const TrainResult trained =
        spec.mode == Mode::Mappo ? train_mappo(run_cfg, seed, train)
                                 : train_ippo(run_cfg, seed, train);
    write_curve_csv((fs::path(run_dir) / "training_curve.csv").string(),
                    trained.curve);
    save_policy((fs::path(run_dir) / "checkpoint.json").string(),
                trained.policy);
    out.skipped_updates = trained.skipped_updates;
    out.train_seconds = trained.train_seconds;
    out.audit = trained.audit;
    eval = evaluate_policy(run_cfg, trained.policy, eval_seed(seed),
                           spec.eval_episodes, /*greedy=*/true,
                           spec.record_steps);
    if (trained.skipped_updates > 0)
      throw std::runtime_error("non-finite training loss (" +
                               std::to_string(trained.skipped_updates) +
                               " minibatches dropped) in " + run_dir);
  } else {
    const BaselineKind kind = spec.mode == Mode::Random
                                  ? BaselineKind::Random
                                  : BaselineKind::LocalOnly;
    eval = run_baseline(run_cfg, kind, eval_seed(seed), spec.eval_episodes,
                        spec.record_steps);
  }

  out.audit = merge_audit(out.audit, eval.audit);
  out.eval_curve = eval.curve;
  write_curve_csv((fs::path(run_dir) / "metrics.csv").string(), eval.curve);
  if (spec.record_steps)
    write_step_csv((fs::path(run_dir) / "steps.csv").string(), eval.records);
  return out;
}

std::string run_experiment(const ExperimentSpec& spec,
                           const std::string& out_root, int workers) {
  spec.validate();
  const auto points = resolve_points(spec);
  const fs::path scenario_dir = fs::path(out_root) / spec.scenario;

  std::vector<Job> jobs;
  for (const auto& [label, cfg] : points)
    for (std::uint64_t seed : spec.seeds) {
      Job job;
      job.point = label;
      job.cfg = cfg;
      job.seed = seed;
      job.run_dir = (scenario_dir / label / mode_name(spec.mode) /
                     ("seed" + std::to_string(seed)))
                        .string();
      jobs.push_back(job);
    }

  std::vector<RunOutcome> outcomes;
  run_jobs(spec, jobs, workers, outcomes);
  write_point_aggregates(spec, scenario_dir.string(), mode_name(spec.mode),
                         points, outcomes);
  emit_plots(out_root);
  return scenario_dir.string();
}

std::string run_evaluation(const ExperimentSpec& spec,
                           const std::string& out_root,
                           const std::string& checkpoint_path, int workers) {
  spec.validate();
  if (checkpoint_path.empty()) {
    if (mode_is_learned(spec.mode))
      fail("evaluating mode " + mode_name(spec.mode) +
           " requires a checkpoint");
    return run_experiment(spec, out_root, workers);
  }
  if (!mode_is_learned(spec.mode))
    fail("mode " + mode_name(spec.mode) + " does not take a checkpoint");

  const PolicyBundle policy = load_policy(checkpoint_path);
  const auto points = resolve_points(spec);
  const fs::path scenario_dir = fs::path(out_root) / spec.scenario;
  const std::string mode_dir = mode_name(spec.mode) + "_eval";

  std::vector<RunOutcome> outcomes;
  for (const auto& [label, cfg] : points) {
    const NetworkConfig run_cfg =
        spec.mode == Mode::Cbo ? cellular_variant(cfg) : cfg;
    for (std::uint64_t seed : spec.seeds) {
      const fs::path run_dir =
          scenario_dir / label / mode_dir / ("seed" + std::to_string(seed));
      fs::create_directories(run_dir);
      const EvalResult eval =
          evaluate_policy(run_cfg, policy, eval_seed(seed), spec.eval_episodes,
                          /*greedy=*/true, spec.record_steps);
      RunOutcome out;
      out.point = label;
      out.seed = seed;
      out.run_dir = run_dir.string();
      out.eval_curve = eval.curve;
      out.audit = eval.audit;
      write_curve_csv((run_dir / "metrics.csv").string(), eval.curve);
      if (spec.record_steps)
        write_step_csv((run_dir / "steps.csv").string(), eval.records);
      outcomes.push_back(std::move(out));
    }
  }
  write_point_aggregates(spec, scenario_dir.string(), mode_dir, points,
                         outcomes);
  emit_plots(out_root);
  return scenario_dir.string();
}

int emit_plots(const std::string& result_root) {
  if (!fs::is_directory(result_root)) {
    std::cerr << "warning: no result directory at " << result_root << "\n";
    return 0;
  }
  const std::vector<AggRecord> records = collect_aggregates(result_root);
  if (records.empty()) {
    std::cerr << "warning: no completed runs under " << result_root << "\n";
    return 0;
  }
  const fs::path plot_dir = fs::path(result_root) / "plots";
  fs::create_directories(plot_dir);
  int written = 0;

  const char* metric_keys[] = {"metric", "mean_reward", "mean_delay_s",
                               "mean_rate_bps", "drop_rate"};

  // Sweep figures: one file per (scenario, axis, metric).
  std::set<std::pair<std::string, std::string>> sweeps;
  for (const AggRecord& r : records)
    if (!r.axis.empty() && r.has_value) sweeps.insert({r.scenario, r.axis});
  for (const auto& [scenario, axis] : sweeps) {
    for (const char* key : metric_keys) {
      std::vector<std::tuple<std::string, double, double, double>> rows;
      for (const AggRecord& r : records) {
        if (r.scenario != scenario || r.axis != axis || !r.has_value) continue;
        if (!r.metrics.contains(key)) continue;
        rows.emplace_back(r.mode, r.value,
                          r.metrics.at(key).at("mean").get<double>(),
                          r.metrics.at(key).at("std").get<double>());
      }
      if (rows.empty()) continue;
      std::sort(rows.begin(), rows.end());
      std::ostringstream csv;
      csv << "x,series,mean,std\n";
      for (const auto& [mode, x, mean, std_] : rows)
        csv << format_double(x) << ',' << mode << ',' << format_double(mean)
            << ',' << format_double(std_) << '\n';
      const std::string name =
          scenario + "_" + key + "_vs_" + axis + ".csv";
      write_text_file((plot_dir / name).string(), csv.str());
      ++written;
    }
  }

  // Training-curve figures: one file per (scenario, point) that has curves;
  // series are modes, the band is the std over seeds.
  std::set<std::pair<std::string, std::string>> curve_points;
  for (const AggRecord& r : records) curve_points.insert({r.scenario, r.point});
  for (const auto& [scenario, point] : curve_points) {
    std::ostringstream csv;
    csv << "episode,series,mean,std\n";
    bool any = false;
    for (const AggRecord& r : records) {
      if (r.scenario != scenario || r.point != point) continue;
      const fs::path mode_dir =
          fs::path(result_root) / scenario / point / r.mode;
      std::vector<std::vector<EpisodeStats>> curves;
      for (const std::string& sub : sorted_subdirs(mode_dir)) {
        const fs::path curve_file = mode_dir / sub / "training_curve.csv";
        if (fs::is_regular_file(curve_file))
          curves.push_back(read_curve_csv(curve_file.string()));
      }
      if (curves.empty()) continue;
      std::size_t episodes = curves[0].size();
      for (const auto& c : curves) episodes = std::min(episodes, c.size());
      for (std::size_t e = 0; e < episodes; ++e) {
        std::vector<double> vals;
        for (const auto& c : curves) vals.push_back(c[e].mean_reward);
        const Aggregate a = aggregate(vals);
        csv << e << ',' << r.mode << ',' << format_double(a.mean) << ','
            << format_double(a.stddev) << '\n';
        any = true;
      }
    }
    if (!any) continue;
    const std::string name = scenario + "_" + point + "_training_reward.csv";
    write_text_file((plot_dir / name).string(), csv.str());
    ++written;
  }

  write_text_file((plot_dir / "render_plots.py").string(), kPlotScript);
  return written;
}

}  // namespace ucmec

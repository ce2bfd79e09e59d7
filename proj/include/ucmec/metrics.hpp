#ifndef UCMEC_METRICS_HPP
#define UCMEC_METRICS_HPP

#include <string>
#include <vector>

#include "ucmec/env.hpp"

namespace ucmec {

// Per-episode training curve row. `metric` is the delay utility evaluated with
// the non-cooperative penalty weight regardless of training mode, so curves
// from different modes compare on one scale.
struct EpisodeStats {
  int episode = 0;
  double mean_reward = 0.0;
  double metric = 0.0;
  double mean_delay_s = 0.0;
  double mean_rate_bps = 0.0;
  double drop_rate = 0.0;
  // Most recent optimizer update as of the episode end; zero during
  // evaluation-only runs and before the first update.
  double policy_loss = 0.0;
  double value_loss = 0.0;
  double entropy = 0.0;
};

// Mean of -T + kappa * (deadline - T) over the rows.
double delay_utility(const std::vector<StepRecord>& rows, double deadline_s,
                     double kappa);

EpisodeStats summarize_episode(int episode, const std::vector<StepRecord>& rows,
                               const NetworkConfig& cfg);

// Shortest text that parses back to the exact double.
std::string format_double(double v);

void write_step_csv(const std::string& path,
                    const std::vector<StepRecord>& rows);
void write_curve_csv(const std::string& path,
                     const std::vector<EpisodeStats>& curve);
std::vector<EpisodeStats> read_curve_csv(const std::string& path);

struct Aggregate {
  double mean = 0.0;
  double stddev = 0.0;
};

Aggregate aggregate(const std::vector<double>& xs);

// Mean of the last `tail` episodes' metric entries (all when tail <= 0).
double curve_tail_mean(const std::vector<EpisodeStats>& curve, int tail);

}  // namespace ucmec

#endif

#include "ucmec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ucmec {

double delay_utility(const std::vector<StepRecord>& rows, double deadline_s,
                     double kappa) {
  if (rows.empty()) return 0.0;
  double acc = 0.0;
  for (const StepRecord& r : rows)
    acc += -r.total_s + kappa * (deadline_s - r.total_s);
  return acc / static_cast<double>(rows.size());
}

EpisodeStats summarize_episode(int episode, const std::vector<StepRecord>& rows,
                               const NetworkConfig& cfg) {
  EpisodeStats s;
  s.episode = episode;
  if (rows.empty()) return s;
  double reward = 0.0, delay = 0.0, rate = 0.0, dropped = 0.0;
  int offloaders = 0;
  for (const StepRecord& r : rows) {
    reward += r.reward;
    delay += r.total_s;
    dropped += r.dropped ? 1.0 : 0.0;
    if (r.target > 0) {
      rate += r.access_rate_bps;
      ++offloaders;
    }
  }
  const double n = static_cast<double>(rows.size());
  s.mean_reward = reward / n;
  s.metric =
      delay_utility(rows, cfg.slot_duration_s, cfg.reward_penalty_noncoop);
  s.mean_delay_s = delay / n;
  s.mean_rate_bps = offloaders > 0 ? rate / offloaders : 0.0;
  s.drop_rate = dropped / n;
  return s;
}

std::string format_double(double v) {
  char buf[40];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

void write_step_csv(const std::string& path,
                    const std::vector<StepRecord>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "episode,slot,user,target,power_index,access_sinr,access_rate_bps,"
         "local_s,access_s,fronthaul_s,edge_s,total_s,dropped,reward\n";
  for (const StepRecord& r : rows) {
    out << r.episode << ',' << r.slot << ',' << r.user << ',' << r.target
        << ',' << r.power_index << ',' << format_double(r.access_sinr) << ','
        << format_double(r.access_rate_bps) << ',' << format_double(r.local_s)
        << ',' << format_double(r.access_s) << ','
        << format_double(r.fronthaul_s) << ',' << format_double(r.edge_s)
        << ',' << format_double(r.total_s) << ',' << (r.dropped ? 1 : 0) << ','
        << format_double(r.reward) << '\n';
  }
}

void write_curve_csv(const std::string& path,
                     const std::vector<EpisodeStats>& curve) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "episode,mean_reward,metric,mean_delay_s,mean_rate_bps,drop_rate,"
         "policy_loss,value_loss,entropy\n";
  for (const EpisodeStats& s : curve) {
    out << s.episode << ',' << format_double(s.mean_reward) << ','
        << format_double(s.metric) << ',' << format_double(s.mean_delay_s)
        << ',' << format_double(s.mean_rate_bps) << ','
        << format_double(s.drop_rate) << ',' << format_double(s.policy_loss)
        << ',' << format_double(s.value_loss) << ','
        << format_double(s.entropy) << '\n';
  }
}

std::vector<EpisodeStats> read_curve_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::vector<EpisodeStats> curve;
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    EpisodeStats s;
    std::getline(ss, cell, ',');
    s.episode = std::stoi(cell);
    std::getline(ss, cell, ',');
    s.mean_reward = std::stod(cell);
    std::getline(ss, cell, ',');
    s.metric = std::stod(cell);
    std::getline(ss, cell, ',');
    s.mean_delay_s = std::stod(cell);
    std::getline(ss, cell, ',');
    s.mean_rate_bps = std::stod(cell);
    std::getline(ss, cell, ',');
    s.drop_rate = std::stod(cell);
    std::getline(ss, cell, ',');
    s.policy_loss = std::stod(cell);
    std::getline(ss, cell, ',');
    s.value_loss = std::stod(cell);
    std::getline(ss, cell, ',');
    s.entropy = std::stod(cell);
    curve.push_back(s);
  }
  return curve;
}

Aggregate aggregate(const std::vector<double>& xs) {
  Aggregate a;
  if (xs.empty()) return a;
  const double n = static_cast<double>(xs.size());
  for (double x : xs) a.mean += x;
  a.mean /= n;
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - a.mean) * (x - a.mean);
    a.stddev = std::sqrt(ss / (n - 1.0));
  }
  return a;
}

double curve_tail_mean(const std::vector<EpisodeStats>& curve, int tail) {
  if (curve.empty()) return 0.0;
  const int n = static_cast<int>(curve.size());
  const int start = tail <= 0 ? 0 : std::max(0, n - tail);
  double acc = 0.0;
  for (int i = start; i < n; ++i) acc += curve[i].metric;
  return acc / static_cast<double>(n - start);
}

}  // namespace ucmec

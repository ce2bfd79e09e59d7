#include "ucmec/topology.hpp"

#include "ucmec/random.hpp"

namespace ucmec {

Matrix pairwise_distances(const Matrix& a, const Matrix& b) {
  Matrix d(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j)
      d(i, j) = (a.row(i) - b.row(j)).norm();
  return d;
}

namespace {

Matrix draw_or_copy(const std::vector<std::array<double, 2>>& fixed, int count,
                    double side, Rng& rng) {
  Matrix pos(count, 2);
  if (!fixed.empty()) {
    for (int i = 0; i < count; ++i) {
      pos(i, 0) = fixed[i][0];
      pos(i, 1) = fixed[i][1];
    }
    return pos;
  }
  for (int i = 0; i < count; ++i) {
    pos(i, 0) = uniform_range(rng, 0.0, side);
    pos(i, 1) = uniform_range(rng, 0.0, side);
  }
  return pos;
}

}  // namespace

Topology place_nodes(const NetworkConfig& cfg, std::uint64_t seed) {
  Rng rng(seed);
  Topology t;
  t.user_pos = draw_or_copy(cfg.user_positions, cfg.user_count, cfg.area_side_m, rng);
  t.ap_pos = draw_or_copy(cfg.ap_positions, cfg.ap_count, cfg.area_side_m, rng);
  t.cpu_pos.resize(cfg.cpu_count, 2);
  for (int k = 0; k < cfg.cpu_count; ++k) {
    t.cpu_pos(k, 0) = cfg.cpu_positions[k][0];
    t.cpu_pos(k, 1) = cfg.cpu_positions[k][1];
  }
  t.local_capacity_hz.resize(cfg.user_count);
  for (int m = 0; m < cfg.user_count; ++m)
    t.local_capacity_hz(m) =
        uniform_range(rng, cfg.local_capacity_min_hz, cfg.local_capacity_max_hz);
  t.edge_capacity_hz.resize(cfg.cpu_count);
  for (int k = 0; k < cfg.cpu_count; ++k)
    t.edge_capacity_hz(k) =
        uniform_range(rng, cfg.edge_capacity_min_hz, cfg.edge_capacity_max_hz);
  t.dist_user_ap = pairwise_distances(t.user_pos, t.ap_pos);
  t.dist_ap_cpu = pairwise_distances(t.ap_pos, t.cpu_pos);
  return t;
}

}  // namespace ucmec

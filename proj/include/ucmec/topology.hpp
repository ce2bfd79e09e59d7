#ifndef UCMEC_TOPOLOGY_HPP
#define UCMEC_TOPOLOGY_HPP

#include <cstdint>

#include "ucmec/config.hpp"
#include "ucmec/types.hpp"

namespace ucmec {

// One placement draw: node coordinates, pairwise distances, computing
// capacities. Distances are Euclidean, in meters.
struct Topology {
  Matrix user_pos;   // M x 2
  Matrix ap_pos;     // N x 2
  Matrix cpu_pos;    // K x 2
  Matrix dist_user_ap;  // M x N
  Matrix dist_ap_cpu;   // N x K
  Vector local_capacity_hz;  // M
  Vector edge_capacity_hz;   // K
};

Matrix pairwise_distances(const Matrix& a, const Matrix& b);

// Draws positions and capacities. Explicit positions in the config override
// the random draw for the corresponding node class; capacities are always
// drawn (collapse the range to pin them).
Topology place_nodes(const NetworkConfig& cfg, std::uint64_t seed);

}  // namespace ucmec

#endif

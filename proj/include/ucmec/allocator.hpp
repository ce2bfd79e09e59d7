#ifndef UCMEC_ALLOCATOR_HPP
#define UCMEC_ALLOCATOR_HPP

#include <vector>

#include "ucmec/types.hpp"

namespace ucmec {

// One CPU's allocation problem: minimize sum(work_m / c_m) subject to
// sum(c_m) = capacity and per-user deadline lower bounds
// c_m >= work_m / max(deadline - fixed_delay_m, eps).
struct AllocationInstance {
  Vector work_cycles;     // per user, > 0
  Vector fixed_delay_s;   // per user, transmission time already spent
  double capacity_hz = 0.0;
  double deadline_s = 0.0;
};

struct AllocationResult {
  Vector allocation_hz;         // per user; 0 for users excluded as infeasible
  std::vector<int> infeasible;  // users whose deadline cannot be met
  bool deadline_feasible = true;
};

// Closed-form KKT structure solved by bisection on the water level. Users
// whose fixed delay already reaches the deadline are reported infeasible and
// excluded; if the remaining minimum demands exceed capacity the solver falls
// back to the unconstrained optimum (allocations proportional to sqrt(work))
// and reports everyone who will still miss the deadline.
AllocationResult allocate(const AllocationInstance& inst);

constexpr double kAllocTimeEps = 1e-6;
constexpr double kAllocRelTol = 1e-9;

}  // namespace ucmec

#endif

#include "ucmec/allocator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ucmec {

namespace {

double clamp(double x, double lo, double hi) {
  return std::min(std::max(x, lo), hi);
}

}  // namespace

AllocationResult allocate(const AllocationInstance& inst) {
  const int users = static_cast<int>(inst.work_cycles.size());
  AllocationResult res;
  res.allocation_hz = Vector::Zero(users);
  if (users == 0) return res;

  const double cap = inst.capacity_hz;
  std::vector<int> solved;  // users that take part in the optimization
  Vector c_min = Vector::Zero(users);
  for (int m = 0; m < users; ++m) {
    if (!(inst.fixed_delay_s(m) < inst.deadline_s)) {
      res.infeasible.push_back(m);
      res.deadline_feasible = false;
      continue;
    }
    const double slack =
        std::max(inst.deadline_s - inst.fixed_delay_s(m), kAllocTimeEps);
    c_min(m) = inst.work_cycles(m) / slack;
    solved.push_back(m);
  }
  if (solved.empty()) return res;

  double min_sum = 0.0;
  for (int m : solved) min_sum += c_min(m);
  const bool bounds_feasible = min_sum <= cap;

  if (!bounds_feasible) {
    // Deadline constraints cannot all hold: fall back to the unconstrained
    // optimum c proportional to sqrt(work) over the full capacity.
    res.deadline_feasible = false;
    double root_sum = 0.0;
    for (int m : solved) root_sum += std::sqrt(inst.work_cycles(m));
    for (int m : solved)
      res.allocation_hz(m) = cap * std::sqrt(inst.work_cycles(m)) / root_sum;
    for (int m : solved) {
      const double delay =
          inst.fixed_delay_s(m) + inst.work_cycles(m) / res.allocation_hz(m);
      if (delay > inst.deadline_s) res.infeasible.push_back(m);
    }
    std::sort(res.infeasible.begin(), res.infeasible.end());
    return res;
  }

  // c_m(nu) = clamp(sqrt(work_m / nu), c_min_m, cap) is non-increasing in nu;
  // bisect until the capacity equality holds.
  auto total = [&](double nu) {
    double s = 0.0;
    for (int m : solved)
      s += clamp(std::sqrt(inst.work_cycles(m) / nu), c_min(m), cap);
    return s;
  };

  double nu_lo = 0.0, nu_hi = 0.0;
  {
    double w_max = 0.0, w_min = std::numeric_limits<double>::infinity();
    for (int m : solved) {
      w_max = std::max(w_max, inst.work_cycles(m));
      w_min = std::min(w_min, inst.work_cycles(m));
    }
    nu_lo = w_min / (cap * cap);
    while (total(nu_lo) < cap) nu_lo *= 0.5;
    nu_hi = std::max(w_max / (cap * cap), nu_lo * 2.0);
    while (total(nu_hi) > cap) nu_hi *= 2.0;
  }
  double nu = 0.5 * (nu_lo + nu_hi);
  for (int it = 0; it < 200; ++it) {
    nu = 0.5 * (nu_lo + nu_hi);
    const double s = total(nu);
    if (std::abs(s - cap) <= kAllocRelTol * cap) break;
    if (s > cap)
      nu_lo = nu;
    else
      nu_hi = nu;
    if ((nu_hi - nu_lo) <= 1e-15 * nu_hi) break;
  }

  for (int m : solved)
    res.allocation_hz(m) = clamp(std::sqrt(inst.work_cycles(m) / nu), c_min(m), cap);

  // Close the residual capacity gap exactly over the users strictly inside
  // their bounds, preserving the optimality ratios.
  double interior_sum = 0.0, bound_sum = 0.0;
  std::vector<int> interior;
  for (int m : solved) {
    const double c = res.allocation_hz(m);
    if (c > c_min(m) * (1.0 + 1e-12) && c < cap * (1.0 - 1e-12)) {
      interior.push_back(m);
      interior_sum += c;
    } else {
      bound_sum += c;
    }
  }
  if (!interior.empty() && interior_sum > 0.0) {
    const double scale = (cap - bound_sum) / interior_sum;
    for (int m : interior)
      res.allocation_hz(m) =
          clamp(res.allocation_hz(m) * scale, c_min(m), cap);
  }
  return res;
}

}  // namespace ucmec

#ifndef UCMEC_BASELINES_HPP
#define UCMEC_BASELINES_HPP

#include <cstdint>

#include "ucmec/trainer.hpp"

namespace ucmec {

// Untrained reference behaviors evaluated through the same environment path
// as the learned policies.
enum class BaselineKind {
  Random,     // uniform target and power
  LocalOnly,  // never offload
};

EvalResult run_baseline(const NetworkConfig& cfg, BaselineKind kind,
                        std::uint64_t seed, int episodes, bool record_steps);

// Cellular comparison setup: one serving AP per user and no fronthaul stage,
// everything else untouched.
NetworkConfig cellular_variant(NetworkConfig cfg);

}  // namespace ucmec

#endif

#ifndef UCMEC_SEEDING_HPP
#define UCMEC_SEEDING_HPP

#include <cstdint>

#include "ucmec/random.hpp"

namespace ucmec {

// Independent random streams hanging off one master seed. Every consumer names
// its stream, so adding a draw in one module never shifts another module's
// sequence.
enum class Stream : std::uint64_t {
  Placement = 1,
  Shadowing = 2,
  Tasks = 3,
  Blockage = 4,
  NetworkInit = 5,
  PolicySample = 6,
  UpdateShuffle = 7,
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, Stream stream,
                                 std::uint64_t episode = 0) {
  std::uint64_t x = splitmix64(master);
  x = splitmix64(x ^ (static_cast<std::uint64_t>(stream) * 0xD1342543DE82EF95ULL));
  x = splitmix64(x ^ (episode * 0x2545F4914F6CDD1DULL));
  return x;
}

inline Rng make_rng(std::uint64_t master, Stream stream, std::uint64_t episode = 0) {
  return Rng(derive_seed(master, stream, episode));
}

}  // namespace ucmec

#endif

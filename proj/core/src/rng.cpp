#include "cdrl/rng.hpp"

namespace cdrl {

std::uint64_t seed_stream(std::uint64_t master, std::uint64_t tag,
                          std::uint64_t index) {
  SplitMix64 g(master ^ (tag + 1) * 0xa0761d6478bd642fULL ^
               (index + 1) * 0xe7037ed1a0b428dbULL);
  g.next();
  return g.next();
}

}  // namespace cdrl

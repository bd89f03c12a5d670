#pragma once

#include <cstdint>

namespace cdrl {

// Deterministic 64-bit generator (splitmix64). Used instead of std engines so
// traces are bit-identical across platforms and stdlib versions.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Uniform in {0, ..., n-1} via multiply-shift. Bias is O(n / 2^64),
  // far below anything a statistical test at this scale can see.
  std::uint64_t next_below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next()) * n) >> 64);
  }

 private:
  std::uint64_t state_;
};

// Splits one master seed into independent substreams. `tag` separates streams
// by purpose (env resets, action sampling, weight init, ...), `index` picks a
// member within the tagged family. The mixing is splitmix64 applied to the
// XOR of master with multiplicatively-spread tag/index words, so substreams
// never alias for distinct (tag, index).
std::uint64_t seed_stream(std::uint64_t master, std::uint64_t tag,
                          std::uint64_t index = 0);

}  // namespace cdrl

#pragma once

#include <cstdint>

namespace bilat {

// Counter-based splittable generator (splitmix64 in counter mode). A stream
// is keyed by (seed, scenario, replication); draws depend only on the key
// and the counter, so results are independent of scheduling.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t scenario, std::uint64_t rep)
      : state_(key(seed, scenario, rep)) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  // Uniform double in [0, 1) with 53 random bits.
  double next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Uniform double in [lo, hi).
  double next_uniform(double lo, double hi) {
    return lo + (hi - lo) * next_unit();
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  static std::uint64_t key(std::uint64_t seed, std::uint64_t scenario,
                           std::uint64_t rep) {
    std::uint64_t k = mix(seed + 0x9e3779b97f4a7c15ULL);
    k = mix(k ^ (scenario + 0xbf58476d1ce4e5b9ULL));
    k = mix(k ^ (rep + 0x94d049bb133111ebULL));
    return k;
  }

  std::uint64_t state_;
};

}  // namespace bilat

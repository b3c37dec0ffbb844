#pragma once

#include <cstdint>
#include <random>

namespace harvestrl {

// Deterministic random stream used by every simulation run.
//
// Engine: std::mt19937_64 (fully specified by the standard), seeded through
// one round of SplitMix64. Conversions to doubles and bounded integers are
// done here rather than with <random> distributions, whose output is
// implementation-defined, so streams replay bit-for-bit across toolchains.
//   uniform01()      -> top 53 bits * 2^-53, in [0, 1)
//   uniform_index(n) -> masked rejection sampling, unbiased
//   split(id)        -> independent child stream keyed by (seed, id)
class Rng {
public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  std::uint64_t seed() const noexcept { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t mask = n - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    for (;;) {
      const std::uint64_t x = engine_() & mask;
      if (x < n) return x;
    }
  }

  Rng split(std::uint64_t stream_id) const {
    return Rng(mix(seed_ ^ mix(stream_id + 0x632be59bd9b4e019ULL)));
  }

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

// Stream ids used by the scenarios; fixed so traces stay stable when the
// agent's consumption of random numbers changes.
inline constexpr std::uint64_t kAgentStream = 1;
inline constexpr std::uint64_t kEnvironmentStream = 2;

}  // namespace harvestrl

#pragma once

#include <cstdint>
#include <limits>

namespace specdemod {

/// @brief Counter-based, splittable random generator (SplitMix64 core).
///
/// Every (seed, stream) pair names an independent sequence, and the i-th
/// output depends only on (seed, stream, i). Parallel pixel simulation is
/// therefore reproducible regardless of scheduling: give each pixel its own
/// stream id and the results cannot depend on thread interleaving.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng() = default;

  static CounterRng keyed(std::uint64_t seed, std::uint64_t stream) {
    CounterRng r;
    r.key_ = mix(seed ^ mix(stream + 0x632be59bd9b4e019ull));
    return r;
  }

  std::uint64_t next_u64() { return mix(key_ + (++counter_) * 0x9e3779b97f4a7c15ull); }

  /// Uniform double in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  std::uint64_t operator()() { return next_u64(); }
  static constexpr std::uint64_t min() { return 0; }
  static constexpr std::uint64_t max() { return std::numeric_limits<std::uint64_t>::max(); }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

/// Exact Poisson draw. Knuth inversion on chunks of the mean, so the result
/// is a sum of independent Poisson variates with the requested total mean and
/// the output distribution is exact for any mean.
std::uint64_t poisson_sample(CounterRng& rng, double mean);

/// Standard normal via Box-Muller (used by test oracles and benches).
double normal_sample(CounterRng& rng);

}  // namespace specdemod

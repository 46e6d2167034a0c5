#include "specdemod/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace specdemod {

namespace {

std::uint64_t knuth_poisson(CounterRng& rng, double mean) {
  const double limit = std::exp(-mean);
  std::uint64_t k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= rng.next_double();
  } while (p > limit);
  return k - 1;
}

}  // namespace

std::uint64_t poisson_sample(CounterRng& rng, double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean))
    throw std::invalid_argument("poisson_sample: mean must be finite and >= 0");
  if (mean == 0.0) return 0;
  std::uint64_t total = 0;
  // keep each inversion chunk small so exp(-chunk) stays well away from underflow
  while (mean > 16.0) {
    total += knuth_poisson(rng, 16.0);
    mean -= 16.0;
  }
  total += knuth_poisson(rng, mean);
  return total;
}

double normal_sample(CounterRng& rng) {
  double u1 = rng.next_double();
  while (u1 <= 0.0) u1 = rng.next_double();
  const double u2 = rng.next_double();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace specdemod

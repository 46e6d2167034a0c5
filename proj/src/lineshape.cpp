#include "specdemod/lineshape.hpp"

#include <cmath>
#include <numbers>

namespace specdemod {

void ResonanceParams::validate() const {
  if (!(gamma > 0.0)) throw std::invalid_argument("ResonanceParams: gamma must be > 0");
  if (!(r0 > 0.0)) throw std::invalid_argument("ResonanceParams: r0 must be > 0");
  if (!(epsilon >= 0.0 && epsilon < 1.0))
    throw std::invalid_argument("ResonanceParams: epsilon must be in [0, 1)");
  if (!std::isfinite(f0)) throw std::invalid_argument("ResonanceParams: f0 must be finite");
}

double lorentzian_rate(double f, const ResonanceParams& p) {
  const double x = (f - p.f0) / p.gamma;
  return p.r0 * (1.0 - p.epsilon / (1.0 + x * x));
}

double GyromagneticConstant::angular() const { return 2.0 * std::numbers::pi * hz_per_tesla; }

double GyromagneticConstant::to_frequency(double b_tesla, double zero_field_freq) const {
  return zero_field_freq + hz_per_tesla * b_tesla;
}

double GyromagneticConstant::to_field(double f_hz, double zero_field_freq) const {
  return (f_hz - zero_field_freq) / hz_per_tesla;
}

double field_to_frequency(double b_tesla, double zero_field_freq) {
  return kGyro.to_frequency(b_tesla, zero_field_freq);
}

double frequency_to_field(double f_hz, double zero_field_freq) {
  return kGyro.to_field(f_hz, zero_field_freq);
}

}  // namespace specdemod

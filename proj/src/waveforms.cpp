#include "specdemod/waveforms.hpp"

#include <cmath>
#include <numbers>

namespace specdemod {

FieldWaveform coil_waveform(const CoilWaveformConfig& cfg) {
  return [cfg](double t) {
    if (t < cfg.start_s) return 0.0;
    const double tau = t - cfg.start_s;
    constexpr double two_pi = 2.0 * std::numbers::pi;
    return cfg.amplitude * (std::sin(two_pi * cfg.tone1_hz * tau) + std::sin(two_pi * cfg.tone2_hz * tau));
  };
}

FieldWaveform ramp_waveform(double rate_t_per_s, double start_s, double b0) {
  return [=](double t) { return t < start_s ? b0 : b0 + rate_t_per_s * (t - start_s); };
}

FieldWaveform constant_waveform(double b_tesla) {
  return [=](double) { return b_tesla; };
}

}  // namespace specdemod

#pragma once

#include <functional>

namespace specdemod {

/// Magnetic field along the probe axis as a function of time (T).
using FieldWaveform = std::function<double(double)>;

/// @brief Two superimposed sine tones of equal amplitude, zero before start.
/// Defaults reproduce the coil drive used for dynamic-range runs.
struct CoilWaveformConfig {
  double amplitude = 0.5e-3;  ///< per-tone amplitude (T)
  double tone1_hz = 0.8;
  double tone2_hz = 4.0;
  double start_s = 0.0;
};

FieldWaveform coil_waveform(const CoilWaveformConfig& cfg = {});

/// B(t) = b0 + rate * (t - start) for t >= start, b0 before.
FieldWaveform ramp_waveform(double rate_t_per_s, double start_s = 0.0, double b0 = 0.0);

FieldWaveform constant_waveform(double b_tesla);

}  // namespace specdemod

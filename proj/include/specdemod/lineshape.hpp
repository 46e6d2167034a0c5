#pragma once

#include <stdexcept>

namespace specdemod {

/// @brief Resonance line parameters: center frequency, half-linewidth,
///        contrast (fractional PL dip) and off-resonance emission rate.
struct ResonanceParams {
  double f0 = 2.87e9;     ///< resonance center frequency (Hz)
  double gamma = 5e6;     ///< half-linewidth Gamma (Hz)
  double epsilon = 0.15;  ///< contrast, 0 <= epsilon < 1
  double r0 = 5e5;        ///< photon emission rate far off resonance (counts/s)

  void validate() const;

  ResonanceParams shifted(double delta_f) const {
    ResonanceParams q = *this;
    q.f0 += delta_f;
    return q;
  }
};

/// Lorentzian emission rate, R0 * [1 - eps * (1 + (f-f0)^2/Gamma^2)^-1].
double lorentzian_rate(double f, const ResonanceParams& p);

/// Line-shape evaluator hook. The demodulation phase is insensitive to the
/// detailed shape, so a Gaussian (or measured shape) can be substituted here.
using LineShapeFn = double (*)(double, const ResonanceParams&);

/// @brief Conversion between resonance frequency and magnetic field.
/// All Hz/T conversions in the library go through this one constant.
struct GyromagneticConstant {
  double hz_per_tesla = 28.0e9;  ///< gamma_e / 2pi

  double angular() const;  ///< gamma_e (rad/s/T)
  double to_frequency(double b_tesla, double zero_field_freq = 0.0) const;
  double to_field(double f_hz, double zero_field_freq = 0.0) const;
};

inline constexpr GyromagneticConstant kGyro{};

double field_to_frequency(double b_tesla, double zero_field_freq);
double frequency_to_field(double f_hz, double zero_field_freq);

}  // namespace specdemod

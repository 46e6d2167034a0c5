#pragma once

#include "specdemod/demod.hpp"

namespace specdemod {

/// Closed-form harmonic coefficients of the swept Lorentzian, phase
/// convention matching demodulate():
///   a_0 = R0 - pi R0 eps Gamma / dfwin,
///   a_n = (pi R0 eps Gamma / dfwin) e^(-2 pi n Gamma / dfwin) e^(i n phi).
/// Valid in the wide-window regime; the neglected sweep truncation grows
/// toward alpha ~ 1 (several percent on |a_1| already at alpha = 3).
HarmonicSet analytic_harmonics(const ResonanceParams& p, const SweepConfig& sweep, int n_max,
                               double t_int = 1.0);

enum class SensitivityMethod {
  demod_phase,      ///< phase of a_1: prefactor * alpha^2 e^(pi/alpha) / (sqrt2 pi^2)
  amplitude_point,  ///< fixed-frequency amplitude detection: prefactor * 0.77
  lstsq_full,       ///< single-parameter linear least squares, full alpha dependence
  lstsq_largealpha  ///< its alpha >> 1 limit: prefactor * sqrt(2 alpha / pi)
};

/// Frequency sensitivity eta (Hz sqrt(s)); all methods share the prefactor
/// 2 Gamma / (eps sqrt(R0)).
double sensitivity(SensitivityMethod method, const ResonanceParams& p, double alpha);

/// Field-unit companion (T sqrt(s)).
double sensitivity_field(SensitivityMethod method, const ResonanceParams& p, double alpha);

/// Dimensionless method factor eta / (2 Gamma / (eps sqrt(R0))).
double sensitivity_factor(SensitivityMethod method, double alpha);

struct MaxRateResult {
  double snr_limited_rate;      ///< 1/s, phase noise equal to the random-phase floor
  double response_time_rate;    ///< 1/s, sweep period >= 100 us
  double binding_rate;          ///< min of the two
  bool snr_is_binding;
};

/// Upper bound on the sample rate: the integration time where the phase
/// uncertainty reaches the fully-random-phase floor, capped by the spin
/// response time.
MaxRateResult max_rate(const ResonanceParams& p, const SweepConfig& sweep);

/// Frequency std of an estimate whose phase is uniformly random over
/// [-pi, pi): dfwin / (2 sqrt(3)), i.e. the std of a uniform distribution
/// over the window.
double random_phase_frequency_std(double delta_f_win);

}  // namespace specdemod

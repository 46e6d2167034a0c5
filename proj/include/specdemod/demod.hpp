#pragma once

#include <complex>
#include <limits>
#include <vector>

#include "specdemod/simulator.hpp"

namespace specdemod {

/// @brief Complex demodulation coefficients a_0..a_n_max of a photon trace.
///
/// a_n = (1/N) sum_k R(t_k) exp(+2 pi i n f_mod t_k), with R = counts/dwell
/// and t_k the bin midpoints. The reference phase is the sweep midpoint: a
/// resonance at the window center f_c gives arg(a_1) = 0, and the dip sign is
/// absorbed so that a_1 points along +Re. A shift of f_0 by delta rotates a_n
/// by n * 2 pi delta / delta_f_win.
struct HarmonicSet {
  std::vector<std::complex<double>> a;
  int n_max = 0;
  double t_int = 0.0;  ///< integration time (s)
  double f_mod = 0.0;

  double noise_sigma() const;  ///< shot-noise std per quadrature, sqrt(a0 / 2 t_int)
};

/// Demodulate a period-aligned trace. Throws if the trace does not span a
/// whole number of modulation periods or if n_max * f_mod exceeds the bin
/// Nyquist rate.
HarmonicSet demodulate(const PhotonTrace& trace, double f_mod, int n_max);

/// @brief Recovered resonance parameters with 1-sigma uncertainties.
struct EstimateRecord {
  static constexpr double nan = std::numeric_limits<double>::quiet_NaN();

  double f0_hat = nan, df0 = nan;
  double gamma_hat = nan, dgamma = nan;
  double epsilon_hat = nan, depsilon = nan;
  double r0_hat = nan, dr0 = nan;
  double phi = nan;  ///< demodulation phase, wrapped to [-pi, pi)

  enum class Method { phase, harmonic_lstsq };
  Method method = Method::phase;

  bool no_lock = false;          ///< |a1| below the noise-floor threshold
  bool ill_conditioned = false;  ///< |a1| <= |a2|: Gamma/epsilon omitted
  bool converged = true;         ///< least-squares refinement converged
};

double phase_uncertainty(const HarmonicSet& h);                              ///< delta phi
double frequency_uncertainty(const HarmonicSet& h, const SweepConfig& sweep);  ///< delta f0

/// Resonance frequency from the phase of a_1:
/// f0 = f_c + arg(a_1) * delta_f_win / (2 pi). Sets no_lock instead of
/// throwing when |a_1| is below 3x the shot-noise floor (resonance likely
/// outside the window).
EstimateRecord phase_to_frequency(const HarmonicSet& h, const SweepConfig& sweep);

/// Adds the first-line parameter estimates to a phase record:
/// Gamma = (dfwin / 2 pi) ln|a1/a2|, eps = (2 alpha / pi) e^(pi/alpha) |a1/a0|,
/// R0 = a0. Requires n_max >= 2.
void estimate_params(const HarmonicSet& h, const SweepConfig& sweep, EstimateRecord& rec);

/// phase_to_frequency followed by estimate_params (when n_max >= 2).
EstimateRecord estimate_all(const HarmonicSet& h, const SweepConfig& sweep);

}  // namespace specdemod

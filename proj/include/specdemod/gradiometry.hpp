#pragma once

#include "specdemod/demod.hpp"

namespace specdemod {

/// @brief Complex coefficients at f_tf + k * f_mod for k in [-n_max, n_max].
/// b(0) sits exactly on the oscillator line and carries no first-order
/// gradient signal (the k-weighting suppresses it); it is kept for
/// diagnostics.
struct SidebandSet {
  std::vector<std::complex<double>> b;  ///< index k + n_max
  int n_max = 0;
  double f_tf = 0.0;
  double f_mod = 0.0;
  double t_int = 0.0;

  const std::complex<double>& at(int k) const { return b.at(static_cast<std::size_t>(k + n_max)); }
};

/// Project the trace onto exp(+2 pi i (f_tf + k f_mod) t). The segment must
/// span whole modulation periods and f_tf must be commensurate with the
/// segment length (leakage would bias the small sidebands); the bin Nyquist
/// rate must clear f_tf + n_max * f_mod.
SidebandSet demodulate_sidebands(const PhotonTrace& trace, double f_mod, double f_tf, int n_max);

struct GradientEstimate {
  double delta_phi = 0.0;      ///< recovered phase-modulation depth (rad)
  double d_delta_phi = 0.0;
  double b1_tesla = 0.0;       ///< oscillating field amplitude B1
  double db1_tesla = 0.0;
  double db_dx = 0.0;          ///< field gradient (T/m)
  double ddb_dx = 0.0;
  bool small_angle_ok = true;  ///< first and second order ratios consistent
};

/// Infer the modulation depth from the sideband/carrier magnitude ratios
/// |b_k| = k |a_k| delta_phi / 2 (orders k = 1, 2, both sideband signs).
/// Magnitudes enter through shot-noise-debiased powers |b|^2 - 2 sigma^2 so
/// the estimate stays unbiased at low sideband SNR. Throws if the carrier is
/// no-lock or x0 == 0.
GradientEstimate estimate_gradient(const SidebandSet& s, const HarmonicSet& h,
                                   const SweepConfig& sweep, double x0);

}  // namespace specdemod

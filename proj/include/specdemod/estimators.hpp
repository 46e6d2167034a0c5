#pragma once

#include "specdemod/demod.hpp"

namespace specdemod {

enum class Estimator { phase, lstsq };

/// @brief Model parameters for the analytic coefficient fit. The resonance
/// frequency is carried as the demodulation phase phi (dimensionless, same
/// conditioning as the other parameters); f0 = f_c + phi * dfwin / 2 pi.
struct CoefficientModelParams {
  double phi = 0.0;
  double epsilon = 0.1;
  double gamma = 5e6;
  double r0 = 5e5;
};

/// Expected coefficients a~_0..a~_n:
/// a~_0 = R0 - pi R0 eps Gamma / dfwin (real),
/// a~_j = (pi R0 eps Gamma / dfwin) e^(-2 pi j Gamma / dfwin) e^(i j phi).
std::vector<std::complex<double>> model_coefficients(const CoefficientModelParams& x,
                                                     const SweepConfig& sweep, int n_max);

/// Residuals (model - measured; Re/Im stacked, a_0 contributes one real row)
/// and the analytic Jacobian w.r.t. (phi, epsilon, gamma, r0).
/// residual has 1 + 2*n_max entries, jacobian is (1 + 2*n_max) x 4 row-major.
void residual_and_jacobian(const CoefficientModelParams& x, const HarmonicSet& h,
                           const SweepConfig& sweep, std::vector<double>& residual,
                           std::vector<double>& jacobian);

struct LstsqOptions {
  int max_iterations = 50;
  double step_tolerance = 1e-9;
  int n_max = 3;  ///< harmonics used; truncated here because higher orders carry little signal
};

/// Least-squares refinement of all four parameters over the measured
/// harmonics (maximum likelihood under equal-variance Gaussian coefficients).
/// Damped Gauss-Newton, warm-started from the phase-method record. Falls back
/// to `init` with converged=false if the iteration budget is exhausted or the
/// normal equations are singular; a no-lock init is returned unchanged.
EstimateRecord harmonic_lstsq(const HarmonicSet& h, const SweepConfig& sweep,
                              const EstimateRecord& init, const LstsqOptions& opt = {});

}  // namespace specdemod

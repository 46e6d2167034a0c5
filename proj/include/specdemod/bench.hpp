#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "specdemod/pipeline.hpp"

namespace specdemod {

/// @brief Sensitivity benchmark: repeated fixed-field acquisitions on a grid
/// of window sizes and integration times, with the closed-form predictions
/// alongside for plotting both benchmark panels (std vs t_int, eta vs alpha).
struct SensitivityBenchConfig {
  std::vector<double> window_sizes = {15e6, 30e6, 60e6};  ///< delta_f_win grid (Hz)
  std::vector<double> t_ints = {1e-3, 10e-3, 100e-3};     ///< integration times (s)
  int n_trials = 200;
  double dwell = 20e-6;
  double f_mod = 1e3;
  Estimator estimator = Estimator::phase;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

struct SensitivityCell {
  double delta_f_win = 0.0;
  double t_int = 0.0;
  double alpha = 0.0;
  double emp_std_hz = 0.0;        ///< std of f0 estimates over the trials
  double predicted_std_hz = 0.0;  ///< shot-noise phase-error propagation
  double eta_emp = 0.0;           ///< emp_std * sqrt(t_int)
  double eta_demod = 0.0;         ///< closed-form demodulation sensitivity
  double eta_lstsq_full = 0.0;
  double eta_lstsq_largealpha = 0.0;
  double eta_amplitude = 0.0;
};

std::vector<SensitivityCell> run_sensitivity_sweep(const ResonanceParams& p,
                                                   const SensitivityBenchConfig& cfg);

void write_sensitivity_csv(const std::vector<SensitivityCell>& cells, const std::string& path);

/// Log-log slope of emp_std vs t_int for one window size (least squares).
double fit_loglog_slope(const std::vector<SensitivityCell>& cells, double delta_f_win);

}  // namespace specdemod

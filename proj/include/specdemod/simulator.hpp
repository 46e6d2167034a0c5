#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "specdemod/lineshape.hpp"
#include "specdemod/waveforms.hpp"

namespace specdemod {

/// @brief Saw-tooth drive configuration: the microwave frequency sweeps
/// linearly from f_c - delta_f_win/2 to f_c + delta_f_win/2 once per period,
/// with instantaneous flyback.
struct SweepConfig {
  double f_c = 2.87e9;       ///< window center (Hz)
  double delta_f_win = 30e6; ///< window span (Hz)
  double f_mod = 1e3;        ///< saw-tooth repetition rate (Hz)

  double period() const { return 1.0 / f_mod; }
  double sweep_rate() const { return f_mod * delta_f_win; }  ///< v (Hz/s)
  double alpha(const ResonanceParams& p) const { return delta_f_win / (2.0 * p.gamma); }

  void validate() const;
};

/// Drive frequency at time t: f_c - dfwin/2 + v * (t mod T).
double instantaneous_drive_frequency(double t, const SweepConfig& sweep);

/// @brief Time-binned photon counts. Counts are integers in shot mode and
/// expected (real) counts in noiseless mode.
struct PhotonTrace {
  double dwell = 20e-6;        ///< bin duration (s)
  double t0 = 0.0;             ///< start time (s)
  std::vector<double> counts;  ///< per-bin counts, >= 0

  std::size_t bins() const { return counts.size(); }
  double duration() const { return static_cast<double>(counts.size()) * dwell; }
  bool integer_counts() const;
};

enum class NoiseMode { shot, none };

/// @brief Tuning-fork gradiometry drive: probe oscillation up-converts the
/// local field gradient into a phase modulation of the periodic PL signal.
struct GradiometryConfig {
  double f_tf = 32e3;    ///< oscillator frequency (Hz)
  double x0 = 50e-9;     ///< oscillation amplitude (m)
  double db_dx = 0.0;    ///< field gradient along the oscillation axis (T/m)
  std::optional<double> delta_phi_override;  ///< use this modulation depth directly

  /// Modulation depth: delta_phi = gamma_e * B1 / delta_f_win, B1 = x0 * dB/dx.
  double delta_phi(const SweepConfig& sweep) const;
};

struct TraceRequest {
  double duration = 10e-3;   ///< requested length (s); rounded down to whole periods
  double dwell = 20e-6;      ///< bin duration (s)
  NoiseMode noise = NoiseMode::shot;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;  ///< RNG stream id (e.g. pixel index)
  double t0 = 0.0;           ///< trace start time (s)
};

struct SynthesisResult {
  PhotonTrace trace;
  bool duration_rounded = false;        ///< request was not a whole number of periods
  bool sweep_period_below_cap = false;  ///< T < 100 us: spin response time not negligible
};

/// Synthesize a photon-count trace of the swept resonance. The per-bin mean
/// uses midpoint evaluation of the drive and field; shot mode draws each bin
/// from a Poisson distribution with that mean, deterministically in
/// (seed, stream).
SynthesisResult synthesize_trace(const ResonanceParams& p, const SweepConfig& sweep,
                                 const FieldWaveform& field, const TraceRequest& req,
                                 LineShapeFn shape = &lorentzian_rate);

/// Same trace with the gradiometry phase modulation applied exactly (the
/// drive is evaluated at t + delta_phi/(2 pi f_mod) * cos(2 pi f_tf t)).
SynthesisResult apply_gradient_modulation(const ResonanceParams& p, const SweepConfig& sweep,
                                          const GradiometryConfig& grad, const FieldWaveform& field,
                                          const TraceRequest& req, LineShapeFn shape = &lorentzian_rate);

}  // namespace specdemod

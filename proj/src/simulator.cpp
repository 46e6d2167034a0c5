#include "specdemod/simulator.hpp"

#include <cmath>
#include <numbers>

#include "specdemod/rng.hpp"

namespace specdemod {

namespace {
constexpr double kMinSweepPeriod = 100e-6;  // spin response-time cap on useful periods
}

void SweepConfig::validate() const {
  if (!(delta_f_win > 0.0)) throw std::invalid_argument("SweepConfig: delta_f_win must be > 0");
  if (!(f_mod > 0.0)) throw std::invalid_argument("SweepConfig: f_mod must be > 0");
}

double instantaneous_drive_frequency(double t, const SweepConfig& sweep) {
  const double T = sweep.period();
  double frac = t / T - std::floor(t / T);
  if (frac >= 1.0) frac = 0.0;  // guard against rounding at exact period multiples
  return sweep.f_c - 0.5 * sweep.delta_f_win + sweep.delta_f_win * frac;
}

bool PhotonTrace::integer_counts() const {
  for (double c : counts)
    if (c != std::floor(c)) return false;
  return true;
}

double GradiometryConfig::delta_phi(const SweepConfig& sweep) const {
  if (delta_phi_override) return *delta_phi_override;
  const double b1 = x0 * db_dx;
  return kGyro.angular() * b1 / sweep.delta_f_win;
}

namespace {

SynthesisResult synthesize_impl(const ResonanceParams& p, const SweepConfig& sweep,
                                const FieldWaveform& field, const TraceRequest& req,
                                LineShapeFn shape, double warp_depth, double f_tf) {
  p.validate();
  sweep.validate();
  if (!(req.duration >= 0.0)) throw std::invalid_argument("synthesize_trace: negative duration");
  if (!(req.dwell > 0.0)) throw std::invalid_argument("synthesize_trace: dwell must be > 0");
  const double T = sweep.period();
  if (req.dwell > T / 10.0 + 1e-15 * T)
    throw std::invalid_argument("synthesize_trace: dwell > T/10 would undersample the sweep");

  SynthesisResult out;
  out.sweep_period_below_cap = T < kMinSweepPeriod;

  // force a whole number of modulation periods; a fractional tail would leak
  // across harmonics and corrupt the demodulated phases
  const double periods_requested = req.duration / T;
  std::uint64_t periods = static_cast<std::uint64_t>(std::floor(periods_requested + 1e-9));
  out.duration_rounded = std::abs(periods_requested - static_cast<double>(periods)) > 1e-9;
  const double bins_per_period_f = T / req.dwell;
  const auto bins_per_period = static_cast<std::uint64_t>(std::llround(bins_per_period_f));
  if (std::abs(bins_per_period_f - static_cast<double>(bins_per_period)) > 1e-6)
    throw std::invalid_argument("synthesize_trace: dwell must divide the sweep period");

  const std::uint64_t n_bins = periods * bins_per_period;
  PhotonTrace& trace = out.trace;
  trace.dwell = req.dwell;
  trace.t0 = req.t0;
  trace.counts.resize(n_bins);

  CounterRng rng = CounterRng::keyed(req.seed, req.stream);
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double warp_scale = warp_depth / (two_pi * sweep.f_mod);

  for (std::uint64_t k = 0; k < n_bins; ++k) {
    const double t_mid = req.t0 + (static_cast<double>(k) + 0.5) * req.dwell;
    double t_drive = t_mid;
    if (warp_scale != 0.0) t_drive += warp_scale * std::cos(two_pi * f_tf * t_mid);
    const double f_drive = instantaneous_drive_frequency(t_drive, sweep);
    const ResonanceParams shifted = p.shifted(kGyro.hz_per_tesla * field(t_mid));
    const double mean = shape(f_drive, shifted) * req.dwell;
    trace.counts[k] = (req.noise == NoiseMode::shot)
                          ? static_cast<double>(poisson_sample(rng, mean))
                          : mean;
  }
  return out;
}

}  // namespace

SynthesisResult synthesize_trace(const ResonanceParams& p, const SweepConfig& sweep,
                                 const FieldWaveform& field, const TraceRequest& req,
                                 LineShapeFn shape) {
  return synthesize_impl(p, sweep, field, req, shape, 0.0, 0.0);
}

SynthesisResult apply_gradient_modulation(const ResonanceParams& p, const SweepConfig& sweep,
                                          const GradiometryConfig& grad, const FieldWaveform& field,
                                          const TraceRequest& req, LineShapeFn shape) {
  if (!(grad.f_tf > sweep.f_mod))
    throw std::invalid_argument("apply_gradient_modulation: f_tf must exceed f_mod (sidebands would alias)");
  return synthesize_impl(p, sweep, field, req, shape, grad.delta_phi(sweep), grad.f_tf);
}

}  // namespace specdemod

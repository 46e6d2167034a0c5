#include "specdemod/tracker.hpp"

#include <algorithm>
#include <cmath>

namespace specdemod {

SlewRate slew_rate(const SweepConfig& sweep, double t_int) {
  if (!(t_int > 0.0)) throw std::invalid_argument("slew_rate: t_int must be > 0");
  SlewRate sr;
  sr.hz_per_s = sweep.delta_f_win / (2.0 * t_int);
  sr.tesla_per_s = kGyro.to_field(sr.hz_per_s);
  return sr;
}

void apply_due_updates(TrackerState& state, double now) {
  std::size_t applied = 0;
  for (; applied < state.pending.size(); ++applied) {
    if (state.pending[applied].apply_time > now) break;
    state.f_c = state.pending[applied].f0;
  }
  state.pending.erase(state.pending.begin(),
                      state.pending.begin() + static_cast<std::ptrdiff_t>(applied));
}

void tracker_step(TrackerState& state, const EstimateRecord& estimate, double now,
                  const TrackerConfig& cfg) {
  if (estimate.no_lock) {
    state.lock = false;
    state.no_lock_run += 1;
    if (cfg.window_recovery && state.no_lock_run >= cfg.recovery_after)
      state.window_scale = std::min(state.window_scale * 2.0, cfg.max_window_scale);
  } else {
    state.lock = true;
    state.no_lock_run = 0;
    state.window_scale = 1.0;
    state.pending.push_back({now + cfg.latency, estimate.f0_hat});
  }
  apply_due_updates(state, now);
  state.history.push_back({now, estimate.f0_hat, state.f_c, state.lock});
}

std::vector<ClosedLoopSample> run_closed_loop(const ResonanceParams& p, const SweepConfig& sweep,
                                              const FieldWaveform& field,
                                              const ClosedLoopConfig& cfg) {
  p.validate();
  sweep.validate();
  if (!(cfg.rate > 0.0)) throw std::invalid_argument("run_closed_loop: rate must be > 0");
  if (cfg.rate * cfg.acquisition.t_int > 1.0 + 1e-9)
    throw std::invalid_argument("run_closed_loop: rate * t_int > 1 (overlapping acquisitions)");

  const auto n_samples = static_cast<std::size_t>(std::floor(cfg.duration * cfg.rate + 1e-9));
  const double t_sample = 1.0 / cfg.rate;

  TrackerState state;
  state.f_c = sweep.f_c;
  std::vector<ClosedLoopSample> out;
  out.reserve(n_samples);

  for (std::size_t k = 0; k < n_samples; ++k) {
    const double t_start = static_cast<double>(k) * t_sample;
    if (cfg.tracking) apply_due_updates(state, t_start);

    SweepConfig sw = sweep;
    sw.f_c = state.f_c;
    sw.delta_f_win = sweep.delta_f_win * state.window_scale;

    const EstimateRecord est =
        acquire_and_estimate(p, sw, field, t_start, static_cast<std::uint64_t>(k), cfg.acquisition);
    if (cfg.tracking) tracker_step(state, est, t_start + cfg.acquisition.t_int, cfg.tracker);

    ClosedLoopSample s;
    s.t = t_start + 0.5 * cfg.acquisition.t_int;
    s.b_true = field(s.t);
    s.b_est = kGyro.to_field(est.f0_hat, p.f0);
    s.f_c = sw.f_c;
    s.window = sw.delta_f_win;
    s.lock = !est.no_lock;
    out.push_back(s);
  }
  return out;
}

}  // namespace specdemod

#pragma once

#include <vector>

#include "specdemod/pipeline.hpp"

namespace specdemod {

/// Maximum trackable rate of resonance-frequency change: the window may move
/// by at most delta_f_win/2 between consecutive estimates.
struct SlewRate {
  double hz_per_s = 0.0;
  double tesla_per_s = 0.0;
};
SlewRate slew_rate(const SweepConfig& sweep, double t_int);

struct TrackerConfig {
  double latency = 10e-3;  ///< dead time between estimate completion and window update
  bool window_recovery = false;  ///< widen the window after repeated lock loss
  int recovery_after = 3;        ///< consecutive no-lock samples before widening
  double max_window_scale = 4.0;
};

struct PendingUpdate {
  double apply_time;
  double f0;
};

struct TrackerHistoryRow {
  double t;
  double f0_hat;
  double f_c;
  bool lock;
};

/// @brief Last-estimate re-centering loop. The window center changes only at
/// sample boundaries, by applying queued estimates whose latency has elapsed.
struct TrackerState {
  double f_c = 2.87e9;
  bool lock = true;
  double window_scale = 1.0;  ///< >1 while lock-loss recovery is widening the window
  int no_lock_run = 0;
  std::vector<PendingUpdate> pending;
  std::vector<TrackerHistoryRow> history;
};

/// Apply queued updates that are due at or before `now` (called at sample
/// boundaries).
void apply_due_updates(TrackerState& state, double now);

/// Feed one estimate into the loop at time `now` (the end of its
/// acquisition). A no-lock estimate drops lock and leaves f_c alone; a valid
/// one is queued for application after the configured latency.
void tracker_step(TrackerState& state, const EstimateRecord& estimate, double now,
                  const TrackerConfig& cfg);

struct ClosedLoopConfig {
  double rate = 50.0;      ///< samples per second
  double duration = 10.0;  ///< run length (s)
  bool tracking = true;
  AcquisitionConfig acquisition;
  TrackerConfig tracker;
};

struct ClosedLoopSample {
  double t;        ///< mid-acquisition time (s)
  double b_true;   ///< ground-truth field at t (T)
  double b_est;    ///< estimated field (T)
  double f_c;      ///< window center during this sample (Hz)
  double window;   ///< instantaneous window span (Hz)
  bool lock;
};

/// Run the acquisition/estimation/re-centering loop against a field
/// waveform. `p.f0` is the zero-field resonance; the initial window is
/// centered on it. With tracking disabled the window never moves and signals
/// beyond +/- delta_f_win/2 wrap or drop lock.
std::vector<ClosedLoopSample> run_closed_loop(const ResonanceParams& p, const SweepConfig& sweep,
                                              const FieldWaveform& field,
                                              const ClosedLoopConfig& cfg);

}  // namespace specdemod

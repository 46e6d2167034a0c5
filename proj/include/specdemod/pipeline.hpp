#pragma once

#include "specdemod/estimators.hpp"
#include "specdemod/simulator.hpp"

namespace specdemod {

/// One sample of the measurement chain: synthesize a trace over
/// [t0, t0 + t_int], demodulate, and estimate with the chosen method.
struct AcquisitionConfig {
  double t_int = 10e-3;
  double dwell = 20e-6;
  NoiseMode noise = NoiseMode::shot;
  Estimator estimator = Estimator::phase;
  int n_max = 2;
  std::uint64_t seed = 1;
};

EstimateRecord acquire_and_estimate(const ResonanceParams& p, const SweepConfig& sweep,
                                    const FieldWaveform& field, double t0, std::uint64_t stream,
                                    const AcquisitionConfig& cfg);

}  // namespace specdemod

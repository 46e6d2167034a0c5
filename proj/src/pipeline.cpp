#include "specdemod/pipeline.hpp"

namespace specdemod {

EstimateRecord acquire_and_estimate(const ResonanceParams& p, const SweepConfig& sweep,
                                    const FieldWaveform& field, double t0, std::uint64_t stream,
                                    const AcquisitionConfig& cfg) {
  TraceRequest req;
  req.duration = cfg.t_int;
  req.dwell = cfg.dwell;
  req.noise = cfg.noise;
  req.seed = cfg.seed;
  req.stream = stream;
  req.t0 = t0;
  const SynthesisResult synth = synthesize_trace(p, sweep, field, req);

  const int n_max = cfg.estimator == Estimator::lstsq ? std::max(cfg.n_max, 3) : cfg.n_max;
  const HarmonicSet h = demodulate(synth.trace, sweep.f_mod, n_max);
  EstimateRecord rec = estimate_all(h, sweep);
  if (cfg.estimator == Estimator::lstsq) rec = harmonic_lstsq(h, sweep, rec);
  return rec;
}

}  // namespace specdemod

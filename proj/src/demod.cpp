#include "specdemod/demod.hpp"

#include <cmath>
#include <numbers>

namespace specdemod {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

double wrap_phase(double phi) {
  // atan2 yields (-pi, pi]; the record convention is [-pi, pi)
  if (phi >= std::numbers::pi) phi -= two_pi;
  return phi;
}
}  // namespace

double HarmonicSet::noise_sigma() const {
  return std::sqrt(a[0].real() / (2.0 * t_int));
}

HarmonicSet demodulate(const PhotonTrace& trace, double f_mod, int n_max) {
  if (!(f_mod > 0.0)) throw std::invalid_argument("demodulate: f_mod must be > 0");
  if (n_max < 0) throw std::invalid_argument("demodulate: n_max must be >= 0");
  if (trace.counts.empty()) throw std::invalid_argument("demodulate: empty trace");
  const double nyquist = 0.5 / trace.dwell;
  if (static_cast<double>(n_max) * f_mod >= nyquist)
    throw std::invalid_argument("demodulate: n_max * f_mod reaches the bin Nyquist rate");

  const std::size_t n_bins = trace.counts.size();
  const double periods = trace.duration() * f_mod;
  if (std::abs(periods - std::round(periods)) > 1e-6 * std::max(1.0, periods))
    throw std::invalid_argument("demodulate: trace does not span a whole number of modulation periods");

  HarmonicSet h;
  h.n_max = n_max;
  h.f_mod = f_mod;
  h.t_int = trace.duration();
  h.a.assign(static_cast<std::size_t>(n_max) + 1, {0.0, 0.0});

  double total = 0.0;
  for (double c : trace.counts) total += c;
  h.a[0] = {total / (static_cast<double>(n_bins) * trace.dwell), 0.0};
  if (n_max == 0) return h;

  const double bins_per_period_f = 1.0 / (f_mod * trace.dwell);
  const auto bins_per_period = static_cast<std::size_t>(std::llround(bins_per_period_f));
  const double t0_bins = trace.t0 / trace.dwell;
  const bool aligned = std::abs(bins_per_period_f - static_cast<double>(bins_per_period)) < 1e-9 &&
                       std::abs(t0_bins - std::round(t0_bins)) < 1e-6;

  if (aligned) {
    // the phasor at n*f_mod repeats every period: fold the counts into one
    // period first, then evaluate a small DFT
    const auto offset = static_cast<std::size_t>(
        static_cast<std::uint64_t>(std::llround(t0_bins)) % bins_per_period);
    std::vector<double> folded(bins_per_period, 0.0);
    for (std::size_t k = 0; k < n_bins; ++k) folded[(k + offset) % bins_per_period] += trace.counts[k];
    const double norm = 1.0 / (static_cast<double>(n_bins) * trace.dwell);
    for (int n = 1; n <= n_max; ++n) {
      std::complex<double> acc{0.0, 0.0};
      for (std::size_t j = 0; j < bins_per_period; ++j) {
        const double ang = two_pi * n * (static_cast<double>(j) + 0.5) / static_cast<double>(bins_per_period);
        acc += folded[j] * std::complex<double>(std::cos(ang), std::sin(ang));
      }
      h.a[static_cast<std::size_t>(n)] = acc * norm;
    }
  } else {
    const double norm = 1.0 / (static_cast<double>(n_bins) * trace.dwell);
    for (int n = 1; n <= n_max; ++n) {
      std::complex<double> acc{0.0, 0.0};
      for (std::size_t k = 0; k < n_bins; ++k) {
        const double t = trace.t0 + (static_cast<double>(k) + 0.5) * trace.dwell;
        const double ang = two_pi * n * f_mod * t;
        acc += trace.counts[k] * std::complex<double>(std::cos(ang), std::sin(ang));
      }
      h.a[static_cast<std::size_t>(n)] = acc * norm;
    }
  }

  // reference-phase convention: t = 0 is the sweep start, so a centered
  // resonance sits mid-period; shift the reference to the window center and
  // absorb the dip sign. Net factor for harmonic n: -(-1)^n.
  for (int n = 1; n <= n_max; ++n)
    if (n % 2 == 0) h.a[static_cast<std::size_t>(n)] = -h.a[static_cast<std::size_t>(n)];
  return h;
}

double phase_uncertainty(const HarmonicSet& h) {
  return h.noise_sigma() / std::abs(h.a.at(1));
}

double frequency_uncertainty(const HarmonicSet& h, const SweepConfig& sweep) {
  return phase_uncertainty(h) * sweep.delta_f_win / two_pi;
}

EstimateRecord phase_to_frequency(const HarmonicSet& h, const SweepConfig& sweep) {
  if (h.a.size() < 2) throw std::invalid_argument("phase_to_frequency: needs n_max >= 1");
  EstimateRecord rec;
  rec.method = EstimateRecord::Method::phase;

  const std::complex<double> a1 = h.a[1];
  rec.phi = wrap_phase(std::arg(a1));
  rec.f0_hat = sweep.f_c + rec.phi * sweep.delta_f_win / two_pi;
  rec.r0_hat = h.a[0].real();
  rec.dr0 = std::sqrt(h.a[0].real() / h.t_int);
  rec.df0 = frequency_uncertainty(h, sweep);
  rec.no_lock = std::abs(a1) < 3.0 * h.noise_sigma();
  return rec;
}

void estimate_params(const HarmonicSet& h, const SweepConfig& sweep, EstimateRecord& rec) {
  if (h.n_max < 2) throw std::invalid_argument("estimate_params: needs n_max >= 2");
  const double m1 = std::abs(h.a[1]);
  const double m2 = std::abs(h.a[2]);
  const double a0 = h.a[0].real();
  rec.r0_hat = a0;
  rec.dr0 = std::sqrt(a0 / h.t_int);

  if (!(m1 > m2) || m2 == 0.0) {
    rec.ill_conditioned = true;  // ln|a1/a2| would be <= 0: no Gamma/epsilon
    return;
  }
  const double sigma = h.noise_sigma();
  const double dfwin = sweep.delta_f_win;
  rec.gamma_hat = dfwin / two_pi * std::log(m1 / m2);
  rec.dgamma = dfwin / two_pi * std::hypot(sigma / m1, sigma / m2);

  const double alpha_hat = dfwin / (2.0 * rec.gamma_hat);
  rec.epsilon_hat = (2.0 * alpha_hat / std::numbers::pi) * std::exp(std::numbers::pi / alpha_hat) * (m1 / a0);
  const double dlneps_dgamma = two_pi / dfwin - 1.0 / rec.gamma_hat;
  rec.depsilon = rec.epsilon_hat * std::sqrt(std::pow(sigma / m1, 2) + 2.0 * std::pow(sigma / a0, 2) +
                                             std::pow(dlneps_dgamma * rec.dgamma, 2));
}

EstimateRecord estimate_all(const HarmonicSet& h, const SweepConfig& sweep) {
  EstimateRecord rec = phase_to_frequency(h, sweep);
  if (h.n_max >= 2) estimate_params(h, sweep, rec);
  return rec;
}

}  // namespace specdemod

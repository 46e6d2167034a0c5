#include "specdemod/gradiometry.hpp"

#include <cmath>
#include <numbers>

#include "specdemod/lineshape.hpp"

namespace specdemod {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
}

SidebandSet demodulate_sidebands(const PhotonTrace& trace, double f_mod, double f_tf, int n_max) {
  if (!(f_tf > f_mod)) throw std::invalid_argument("demodulate_sidebands: f_tf must exceed f_mod");
  if (n_max < 1) throw std::invalid_argument("demodulate_sidebands: n_max must be >= 1");
  if (trace.counts.empty()) throw std::invalid_argument("demodulate_sidebands: empty trace");

  const double t_int = trace.duration();
  const double periods = t_int * f_mod;
  if (std::abs(periods - std::round(periods)) > 1e-6 * std::max(1.0, periods))
    throw std::invalid_argument("demodulate_sidebands: trace does not span whole modulation periods");
  const double tf_cycles = t_int * f_tf;
  if (std::abs(tf_cycles - std::round(tf_cycles)) > 1e-6 * std::max(1.0, tf_cycles))
    throw std::invalid_argument(
        "demodulate_sidebands: f_tf is not commensurate with the segment length");
  const double nyquist = 0.5 / trace.dwell;
  if (f_tf + static_cast<double>(n_max) * f_mod >= nyquist)
    throw std::invalid_argument("demodulate_sidebands: sideband frequencies reach the bin Nyquist rate");

  SidebandSet s;
  s.n_max = n_max;
  s.f_tf = f_tf;
  s.f_mod = f_mod;
  s.t_int = t_int;
  s.b.assign(2 * static_cast<std::size_t>(n_max) + 1, {0.0, 0.0});

  const std::size_t n_bins = trace.counts.size();
  const double norm = 1.0 / (static_cast<double>(n_bins) * trace.dwell);
  for (int k = -n_max; k <= n_max; ++k) {
    const double f = f_tf + static_cast<double>(k) * f_mod;
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t j = 0; j < n_bins; ++j) {
      const double t = trace.t0 + (static_cast<double>(j) + 0.5) * trace.dwell;
      const double ang = two_pi * f * t;
      acc += trace.counts[j] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    s.b[static_cast<std::size_t>(k + n_max)] = acc * norm;
  }
  return s;
}

GradientEstimate estimate_gradient(const SidebandSet& s, const HarmonicSet& h,
                                   const SweepConfig& sweep, double x0) {
  if (h.n_max < 2 || s.n_max < 2)
    throw std::invalid_argument("estimate_gradient: needs carrier and sideband orders up to 2");
  const double sigma = h.noise_sigma();
  if (std::abs(h.a[1]) < 3.0 * sigma)
    throw std::runtime_error("estimate_gradient: carrier is no-lock, gradient undefined");
  if (x0 == 0.0) throw std::invalid_argument("estimate_gradient: x0 == 0, dB/dx undefined");

  const double sigma2 = sigma * sigma;

  // weighted LS for delta_phi^2 over the debiased sideband powers
  // p = |b|^2 - 2 sigma^2, model p = (k |a_k| / 2)^2 * delta_phi^2;
  // both sideband signs of an order are independent measurements
  double num = 0.0, den = 0.0;
  double order_power[3] = {0.0, 0.0, 0.0};  // per-order mean debiased power
  for (int k = 1; k <= 2; ++k) {
    const double gain = 0.5 * k * std::abs(h.a[static_cast<std::size_t>(k)]);
    const double g2 = gain * gain;
    double p_mean = 0.0;
    for (int sign : {-1, +1}) {
      const double m = std::abs(s.at(sign * k));
      p_mean += 0.5 * (m * m - 2.0 * sigma2);
    }
    order_power[k] = p_mean;
    // variance of the mean of the two debiased powers, with the measured
    // power standing in for |b|^2
    const double expected_b2 = std::max(p_mean, 0.0) + sigma2;
    const double var_p = 0.5 * (4.0 * sigma2 * expected_b2 + 4.0 * sigma2 * sigma2);
    const double w = 1.0 / std::max(var_p, 1e-300);
    num += w * g2 * p_mean;
    den += w * g2 * g2;
  }

  GradientEstimate out;
  const double dphi2 = num / den;
  out.delta_phi = std::sqrt(std::max(dphi2, 0.0));
  const double d_dphi2 = std::sqrt(1.0 / den);
  out.d_delta_phi = out.delta_phi > 0.0 ? 0.5 * d_dphi2 / out.delta_phi : std::sqrt(d_dphi2);

  out.b1_tesla = out.delta_phi * sweep.delta_f_win / kGyro.angular();
  out.db1_tesla = out.d_delta_phi * sweep.delta_f_win / kGyro.angular();
  out.db_dx = out.b1_tesla / x0;
  out.ddb_dx = out.db1_tesla / x0;

  // consistency of the per-order ratios flags departure from the
  // small-angle (first-order) regime
  const double g1 = 0.5 * std::abs(h.a[1]);
  const double g2 = 1.0 * std::abs(h.a[2]);
  const double r1 = std::sqrt(std::max(order_power[1], 0.0)) / g1;
  const double r2 = std::sqrt(std::max(order_power[2], 0.0)) / g2;
  const double noise_allowance = 3.0 * sigma * (1.0 / g1 + 1.0 / g2) / std::sqrt(2.0 * 2.0);
  out.small_angle_ok = std::abs(r2 - r1) <= 0.03 * std::max(r1, r2) + noise_allowance;
  return out;
}

}  // namespace specdemod

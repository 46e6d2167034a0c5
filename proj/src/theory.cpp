#include "specdemod/theory.hpp"

#include <cmath>
#include <numbers>

namespace specdemod {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;
constexpr double pi = std::numbers::pi;
constexpr double kResponseTimeCapRate = 1.0e4;  // sweep period >= 100 us
}  // namespace

HarmonicSet analytic_harmonics(const ResonanceParams& p, const SweepConfig& sweep, int n_max,
                               double t_int) {
  p.validate();
  sweep.validate();
  HarmonicSet h;
  h.n_max = n_max;
  h.f_mod = sweep.f_mod;
  h.t_int = t_int;
  h.a.resize(static_cast<std::size_t>(n_max) + 1);

  const double amp = pi * p.r0 * p.epsilon * p.gamma / sweep.delta_f_win;
  const double decay = two_pi * p.gamma / sweep.delta_f_win;
  const double phi = two_pi * (p.f0 - sweep.f_c) / sweep.delta_f_win;
  h.a[0] = {p.r0 - amp, 0.0};
  for (int n = 1; n <= n_max; ++n)
    h.a[static_cast<std::size_t>(n)] = std::polar(amp * std::exp(-decay * n), phi * n);
  return h;
}

double sensitivity_factor(SensitivityMethod method, double alpha) {
  if (!(alpha > 0.0)) throw std::invalid_argument("sensitivity: alpha must be > 0");
  switch (method) {
    case SensitivityMethod::demod_phase:
      return alpha * alpha * std::exp(pi / alpha) / (std::sqrt(2.0) * pi * pi);
    case SensitivityMethod::amplitude_point:
      return 0.77;
    case SensitivityMethod::lstsq_full: {
      const double a = alpha;
      const double a2 = a * a;
      const double bracket = (a2 * a2 + (8.0 / 3.0) * a2 * a - a) / std::pow(1.0 + a2, 3) + std::atan(a);
      return std::sqrt(a / bracket);
    }
    case SensitivityMethod::lstsq_largealpha:
      return std::sqrt(2.0 * alpha / pi);
  }
  throw std::invalid_argument("sensitivity: unknown method");
}

double sensitivity(SensitivityMethod method, const ResonanceParams& p, double alpha) {
  p.validate();
  if (!(p.epsilon > 0.0)) throw std::invalid_argument("sensitivity: epsilon must be > 0");
  const double prefactor = 2.0 * p.gamma / (p.epsilon * std::sqrt(p.r0));
  return prefactor * sensitivity_factor(method, alpha);
}

double sensitivity_field(SensitivityMethod method, const ResonanceParams& p, double alpha) {
  return sensitivity(method, p, alpha) / kGyro.hz_per_tesla;
}

MaxRateResult max_rate(const ResonanceParams& p, const SweepConfig& sweep) {
  p.validate();
  sweep.validate();
  const double alpha = sweep.alpha(p);
  MaxRateResult r;
  r.snr_limited_rate = p.epsilon * p.epsilon * p.r0 * std::pow(pi, 4) /
                       (6.0 * alpha * alpha * std::exp(two_pi / alpha));
  r.response_time_rate = kResponseTimeCapRate;
  r.snr_is_binding = r.snr_limited_rate <= r.response_time_rate;
  r.binding_rate = r.snr_is_binding ? r.snr_limited_rate : r.response_time_rate;
  return r;
}

double random_phase_frequency_std(double delta_f_win) {
  return delta_f_win / (2.0 * std::sqrt(3.0));
}

}  // namespace specdemod

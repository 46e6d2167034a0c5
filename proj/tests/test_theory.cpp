#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "specdemod/rng.hpp"
#include "specdemod/theory.hpp"

using namespace specdemod;

namespace {
ResonanceParams paper_probe() {
  ResonanceParams p;
  p.f0 = 2.87e9;
  p.gamma = 5e6;
  p.epsilon = 0.15;
  p.r0 = 5e5;
  return p;
}
}  // namespace

TEST_CASE("analytic harmonics: magnitudes, decay ratio, zero contrast") {
  ResonanceParams p = paper_probe();
  SweepConfig s;
  s.f_c = p.f0;
  s.delta_f_win = 30e6;
  s.f_mod = 1e3;
  const auto h = analytic_harmonics(p, s, 2, 10e-3);
  CHECK(std::abs(h.a[1]) == doctest::Approx(1.3781e4).epsilon(1e-3));
  CHECK(std::abs(h.a[2]) / std::abs(h.a[1]) == doctest::Approx(std::exp(-oracle::pi / 3.0)).epsilon(1e-12));
  CHECK(std::abs(h.a[2]) / std::abs(h.a[1]) == doctest::Approx(0.35092).epsilon(1e-3));
  CHECK(h.a[0].real() == doctest::Approx(p.r0 * (1.0 - oracle::pi * 0.15 / 6.0)).epsilon(1e-12));

  p.epsilon = 0.0;
  const auto h0 = analytic_harmonics(p, s, 3, 10e-3);
  CHECK(h0.a[0].real() == p.r0);
  for (int n = 1; n <= 3; ++n) CHECK(std::abs(h0.a[static_cast<std::size_t>(n)]) == 0.0);
}

TEST_CASE("analytic harmonics carry the demodulation phase convention") {
  ResonanceParams p = paper_probe();
  SweepConfig s;
  s.delta_f_win = 30e6;
  s.f_mod = 1e3;
  s.f_c = p.f0 - 0.25 * s.delta_f_win;
  const auto h = analytic_harmonics(p, s, 2, 10e-3);
  CHECK(std::arg(h.a[1]) == doctest::Approx(oracle::pi / 2).epsilon(1e-12));
  CHECK(std::abs(oracle::wrap_to_pi(std::arg(h.a[2]) - oracle::pi)) < 1e-9);
}

TEST_CASE("sensitivity factors: named values and the alpha = pi/2 minimum") {
  CHECK(sensitivity_factor(SensitivityMethod::demod_phase, oracle::pi / 2) ==
        doctest::Approx(std::exp(2.0) / (4.0 * std::sqrt(2.0))).epsilon(1e-12));
  CHECK(sensitivity_factor(SensitivityMethod::demod_phase, oracle::pi / 2) ==
        doctest::Approx(1.3062).epsilon(1e-4));
  CHECK(sensitivity_factor(SensitivityMethod::demod_phase, oracle::pi / 2) <
        sensitivity_factor(SensitivityMethod::demod_phase, oracle::pi / 2 + 0.1));
  CHECK(sensitivity_factor(SensitivityMethod::demod_phase, oracle::pi / 2) <
        sensitivity_factor(SensitivityMethod::demod_phase, oracle::pi / 2 - 0.1));

  // single-parameter least squares: near unity at alpha = 1, large-alpha form
  CHECK(sensitivity_factor(SensitivityMethod::lstsq_full, 1.0) == doctest::Approx(1.0).epsilon(0.06));
  CHECK(sensitivity_factor(SensitivityMethod::lstsq_full, 20.0) /
            sensitivity_factor(SensitivityMethod::lstsq_largealpha, 20.0) ==
        doctest::Approx(1.0).epsilon(0.05));
  // monotone degradation of the demodulation method at large alpha
  CHECK(sensitivity_factor(SensitivityMethod::demod_phase, 8.0) >
        sensitivity_factor(SensitivityMethod::demod_phase, 2.0));

  const ResonanceParams p = paper_probe();
  CHECK(sensitivity(SensitivityMethod::amplitude_point, p, 3.0) ==
        doctest::Approx(0.77 * 2.0 * p.gamma / (p.epsilon * std::sqrt(p.r0))).epsilon(1e-12));
  CHECK(sensitivity_field(SensitivityMethod::demod_phase, p, 3.0) ==
        doctest::Approx(sensitivity(SensitivityMethod::demod_phase, p, 3.0) / 28e9).epsilon(1e-12));
}

TEST_CASE("prefactor scaling: eta scales linearly with Gamma at fixed alpha") {
  ResonanceParams p = paper_probe();
  for (auto method : {SensitivityMethod::demod_phase, SensitivityMethod::amplitude_point,
                      SensitivityMethod::lstsq_full, SensitivityMethod::lstsq_largealpha}) {
    const double base = sensitivity(method, p, 3.0);
    ResonanceParams q = p;
    q.gamma = 2.7 * p.gamma;
    CHECK(sensitivity(method, q, 3.0) == doctest::Approx(2.7 * base).epsilon(1e-12));
  }
}

TEST_CASE("max rate: named value, epsilon scaling, response-time cap") {
  ResonanceParams p = paper_probe();
  p.epsilon = 0.2;
  SweepConfig s;
  s.f_c = p.f0;
  s.delta_f_win = 30e6;
  s.f_mod = 1e3;
  const auto r = max_rate(p, s);
  CHECK(r.snr_limited_rate == doctest::Approx(4.4e3).epsilon(0.02));
  CHECK(r.snr_is_binding);
  CHECK(r.binding_rate == r.snr_limited_rate);

  ResonanceParams half = p;
  half.epsilon = 0.1;
  CHECK(max_rate(half, s).snr_limited_rate == doctest::Approx(r.snr_limited_rate / 4.0).epsilon(1e-12));

  ResonanceParams bright = p;
  bright.epsilon = 0.5;
  bright.r0 = 5e7;  // SNR-limited rate far above the spin response cap
  const auto r2 = max_rate(bright, s);
  CHECK_FALSE(r2.snr_is_binding);
  CHECK(r2.binding_rate == 1.0e4);
}

TEST_CASE("random-phase floor equals the Monte-Carlo std of wrapped uniform phases") {
  const double dfwin = 30e6;
  CHECK(random_phase_frequency_std(dfwin) == doctest::Approx(8.6603e6).epsilon(1e-4));
  CounterRng rng = CounterRng::keyed(11, 0);
  std::vector<double> f;
  f.reserve(500000);
  for (int i = 0; i < 500000; ++i) {
    const double phi = (rng.next_double() - 0.5) * 2.0 * oracle::pi;  // uniform [-pi, pi)
    f.push_back(phi * dfwin / (2.0 * oracle::pi));
  }
  CHECK(oracle::sample_std(f) == doctest::Approx(random_phase_frequency_std(dfwin)).epsilon(0.005));
}

TEST_CASE("single-parameter linear least squares reproduces its sensitivity formula") {
  // the oracle implements exactly the relaxed fit the formula describes:
  // only f0 floats, one linear step from the truth, window centered. Keep it
  // that way; a full nonlinear fit answers a different question.
  const ResonanceParams p = paper_probe();
  CounterRng rng = CounterRng::keyed(21, 0);
  const int n_points = 800;
  const int n_trials = 500;
  const double t_int = 10e-3;

  for (double alpha : {1.0, 2.0, 4.0, 8.0}) {
    const double dfwin = 2.0 * alpha * p.gamma;
    const double per_point_t = t_int / n_points;
    const double sigma = std::sqrt(p.r0 * per_point_t);  // counts noise per point

    // Jacobian of the counts model w.r.t. f0 at the truth
    std::vector<double> jac(n_points);
    double jtj = 0.0;
    for (int k = 0; k < n_points; ++k) {
      const double f = p.f0 + dfwin * ((k + 0.5) / n_points - 0.5);
      const double x = (f - p.f0) / p.gamma;
      const double dRdf0 = p.r0 * p.epsilon * (-2.0 * x / p.gamma) / ((1.0 + x * x) * (1.0 + x * x));
      jac[static_cast<std::size_t>(k)] = dRdf0 * per_point_t;
      jtj += jac[static_cast<std::size_t>(k)] * jac[static_cast<std::size_t>(k)];
    }
    std::vector<double> estimates;
    estimates.reserve(n_trials);
    for (int trial = 0; trial < n_trials; ++trial) {
      double jtw = 0.0;
      for (int k = 0; k < n_points; ++k)
        jtw += jac[static_cast<std::size_t>(k)] * (sigma * normal_sample(rng));
      estimates.push_back(jtw / jtj);  // linear LS step from the truth
    }
    const double eta_mc = oracle::sample_std(estimates) * std::sqrt(t_int);
    const double eta_formula = sensitivity(SensitivityMethod::lstsq_full, p, alpha);
    CHECK(eta_mc == doctest::Approx(eta_formula).epsilon(0.10));
  }
}

#include "specdemod/estimators.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

namespace specdemod {

namespace {
constexpr double two_pi = 2.0 * std::numbers::pi;

double wrap_phase(double phi) {
  phi = std::remainder(phi, two_pi);
  if (phi >= std::numbers::pi) phi -= two_pi;
  return phi;
}
}  // namespace

std::vector<std::complex<double>> model_coefficients(const CoefficientModelParams& x,
                                                     const SweepConfig& sweep, int n_max) {
  const double amp = std::numbers::pi * x.r0 * x.epsilon * x.gamma / sweep.delta_f_win;
  const double decay = two_pi * x.gamma / sweep.delta_f_win;
  std::vector<std::complex<double>> a(static_cast<std::size_t>(n_max) + 1);
  a[0] = {x.r0 - amp, 0.0};
  for (int j = 1; j <= n_max; ++j)
    a[static_cast<std::size_t>(j)] = std::polar(amp * std::exp(-decay * j), x.phi * j);
  return a;
}

void residual_and_jacobian(const CoefficientModelParams& x, const HarmonicSet& h,
                           const SweepConfig& sweep, std::vector<double>& residual,
                           std::vector<double>& jacobian) {
  const int n_max = h.n_max;
  const auto model = model_coefficients(x, sweep, n_max);
  const std::size_t rows = 1 + 2 * static_cast<std::size_t>(n_max);
  residual.assign(rows, 0.0);
  jacobian.assign(rows * 4, 0.0);

  const double amp = std::numbers::pi * x.r0 * x.epsilon * x.gamma / sweep.delta_f_win;
  residual[0] = model[0].real() - h.a[0].real();
  jacobian[0 * 4 + 0] = 0.0;
  jacobian[0 * 4 + 1] = -amp / x.epsilon;
  jacobian[0 * 4 + 2] = -amp / x.gamma;
  jacobian[0 * 4 + 3] = 1.0 - amp / x.r0;

  for (int j = 1; j <= n_max; ++j) {
    const std::complex<double> aj = model[static_cast<std::size_t>(j)];
    const std::complex<double> d_phi = std::complex<double>(0.0, static_cast<double>(j)) * aj;
    const std::complex<double> d_eps = aj / x.epsilon;
    const std::complex<double> d_gam = aj * (1.0 / x.gamma - two_pi * j / sweep.delta_f_win);
    const std::complex<double> d_r0 = aj / x.r0;
    const std::complex<double> diff = aj - h.a[static_cast<std::size_t>(j)];
    const std::size_t re_row = static_cast<std::size_t>(2 * j - 1);
    const std::size_t im_row = static_cast<std::size_t>(2 * j);
    residual[re_row] = diff.real();
    residual[im_row] = diff.imag();
    const std::complex<double> grads[4] = {d_phi, d_eps, d_gam, d_r0};
    for (int c = 0; c < 4; ++c) {
      jacobian[re_row * 4 + static_cast<std::size_t>(c)] = grads[c].real();
      jacobian[im_row * 4 + static_cast<std::size_t>(c)] = grads[c].imag();
    }
  }
}

EstimateRecord harmonic_lstsq(const HarmonicSet& h, const SweepConfig& sweep,
                              const EstimateRecord& init, const LstsqOptions& opt) {
  if (init.no_lock) return init;  // nothing to refine against
  const int n_max = std::min(opt.n_max, h.n_max);
  if (n_max < 2) throw std::invalid_argument("harmonic_lstsq: needs n_max >= 2");

  HarmonicSet hn = h;
  hn.n_max = n_max;
  hn.a.resize(static_cast<std::size_t>(n_max) + 1);

  CoefficientModelParams x;
  x.phi = std::isfinite(init.phi) ? init.phi : 0.0;
  x.epsilon = std::isfinite(init.epsilon_hat) ? std::clamp(init.epsilon_hat, 1e-4, 0.99) : 0.1;
  x.gamma = std::isfinite(init.gamma_hat) && init.gamma_hat > 0.0 ? init.gamma_hat
                                                                  : sweep.delta_f_win / 6.0;
  x.r0 = init.r0_hat > 0.0 ? init.r0_hat : h.a[0].real();

  std::vector<double> r_vec, j_vec;
  const auto cost_of = [&](const CoefficientModelParams& p) {
    std::vector<double> rr, jj;
    residual_and_jacobian(p, hn, sweep, rr, jj);
    double c = 0.0;
    for (double v : rr) c += v * v;
    return c;
  };

  residual_and_jacobian(x, hn, sweep, r_vec, j_vec);
  double cost = 0.0;
  for (double v : r_vec) cost += v * v;

  double lambda = 1e-2;
  bool converged = false;
  bool singular = false;
  const std::size_t rows = r_vec.size();

  // steps are taken in (phi, ln eps, ln Gamma, ln R0): dimensionless,
  // equally scaled, and the positive parameters cannot jump sign or run off
  // by orders of magnitude in one iteration
  for (int it = 0; it < opt.max_iterations && !converged && !singular; ++it) {
    const double log_scale[4] = {1.0, x.epsilon, x.gamma, x.r0};
    Eigen::MatrixXd J(rows, 4);
    Eigen::VectorXd r(rows);
    for (std::size_t i = 0; i < rows; ++i) {
      r(static_cast<Eigen::Index>(i)) = r_vec[i];
      for (int c = 0; c < 4; ++c)
        J(static_cast<Eigen::Index>(i), c) =
            j_vec[i * 4 + static_cast<std::size_t>(c)] * log_scale[c];
    }
    const Eigen::Matrix4d jtj = J.transpose() * J;
    const Eigen::Vector4d jtr = J.transpose() * r;

    bool accepted = false;
    for (int attempt = 0; attempt < 16 && !accepted; ++attempt) {
      Eigen::Matrix4d damped = jtj;
      const double diag_floor = 1e-12 * jtj.diagonal().maxCoeff();
      for (int c = 0; c < 4; ++c) damped(c, c) += lambda * std::max(jtj(c, c), diag_floor);
      Eigen::Vector4d step = damped.ldlt().solve(-jtr);
      if (!step.allFinite()) {
        singular = true;
        break;
      }
      const double biggest = step.cwiseAbs().maxCoeff();
      if (biggest > 1.0) step *= 1.0 / biggest;  // at most a factor e per iteration
      CoefficientModelParams trial = x;
      trial.phi = x.phi + step(0);
      trial.epsilon = std::clamp(x.epsilon * std::exp(step(1)), 1e-8, 0.999);
      trial.gamma = x.gamma * std::exp(step(2));
      trial.r0 = x.r0 * std::exp(step(3));
      const double trial_cost = cost_of(trial);
      if (trial_cost < cost || (trial_cost == cost && biggest < opt.step_tolerance)) {
        x = trial;
        cost = trial_cost;
        lambda = std::max(lambda / 3.0, 1e-14);
        residual_and_jacobian(x, hn, sweep, r_vec, j_vec);
        if (biggest < opt.step_tolerance) converged = true;
        accepted = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!accepted && !singular) {
      // damping exhausted without a downhill step: we are at a (local)
      // optimum to working precision
      converged = true;
    }
  }

  if (singular || !converged) {
    EstimateRecord out = init;
    out.converged = false;
    return out;
  }

  EstimateRecord rec;
  rec.method = EstimateRecord::Method::harmonic_lstsq;
  rec.converged = true;
  rec.phi = wrap_phase(x.phi);
  rec.f0_hat = sweep.f_c + rec.phi * sweep.delta_f_win / two_pi;
  rec.gamma_hat = x.gamma;
  rec.epsilon_hat = x.epsilon;
  rec.r0_hat = x.r0;

  // 1-sigma uncertainties from the unscaled normal equations at the optimum
  Eigen::MatrixXd J(rows, 4);
  for (std::size_t i = 0; i < rows; ++i)
    for (int c = 0; c < 4; ++c)
      J(static_cast<Eigen::Index>(i), c) = j_vec[i * 4 + static_cast<std::size_t>(c)];
  const double sigma2 = hn.a[0].real() / (2.0 * hn.t_int);
  const Eigen::Matrix4d cov = sigma2 * (J.transpose() * J).inverse();
  if (cov.allFinite()) {
    rec.df0 = std::sqrt(std::max(cov(0, 0), 0.0)) * sweep.delta_f_win / two_pi;
    rec.depsilon = std::sqrt(std::max(cov(1, 1), 0.0));
    rec.dgamma = std::sqrt(std::max(cov(2, 2), 0.0));
    rec.dr0 = std::sqrt(std::max(cov(3, 3), 0.0));
  }
  return rec;
}

}  // namespace specdemod

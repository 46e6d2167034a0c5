#include "specdemod/bench.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <thread>

#include "specdemod/theory.hpp"

namespace specdemod {

namespace {

double sample_std(const std::vector<double>& v) {
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / (static_cast<double>(v.size()) - 1.0));
}

}  // namespace

std::vector<SensitivityCell> run_sensitivity_sweep(const ResonanceParams& p,
                                                   const SensitivityBenchConfig& cfg) {
  p.validate();
  if (cfg.n_trials < 100)
    throw std::invalid_argument("run_sensitivity_sweep: n_trials must be >= 100");

  std::vector<SensitivityCell> cells;
  std::uint64_t stream_base = 0;
  for (double dfwin : cfg.window_sizes) {
    for (double t_int : cfg.t_ints) {
      SweepConfig sweep;
      sweep.f_c = p.f0;  // resonance centered, no field modulation
      sweep.delta_f_win = dfwin;
      sweep.f_mod = cfg.f_mod;

      AcquisitionConfig acq;
      acq.t_int = t_int;
      acq.dwell = cfg.dwell;
      acq.noise = NoiseMode::shot;
      acq.estimator = cfg.estimator;
      acq.n_max = 2;
      acq.seed = cfg.seed;

      std::vector<double> f0(static_cast<std::size_t>(cfg.n_trials));
      unsigned n_threads = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
      if (n_threads == 0) n_threads = 1;
      std::atomic<int> next{0};
      auto worker = [&]() {
        for (;;) {
          const int i = next.fetch_add(1);
          if (i >= cfg.n_trials) return;
          const EstimateRecord rec =
              acquire_and_estimate(p, sweep, constant_waveform(0.0), 0.0,
                                   stream_base + static_cast<std::uint64_t>(i), acq);
          f0[static_cast<std::size_t>(i)] = rec.f0_hat;
        }
      };
      std::vector<std::thread> pool;
      for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
      worker();
      for (auto& th : pool) th.join();
      stream_base += static_cast<std::uint64_t>(cfg.n_trials);

      SensitivityCell cell;
      cell.delta_f_win = dfwin;
      cell.t_int = t_int;
      cell.alpha = sweep.alpha(p);
      cell.emp_std_hz = sample_std(f0);
      const HarmonicSet pred = analytic_harmonics(p, sweep, 1, t_int);
      cell.predicted_std_hz = frequency_uncertainty(pred, sweep);
      cell.eta_emp = cell.emp_std_hz * std::sqrt(t_int);
      cell.eta_demod = sensitivity(SensitivityMethod::demod_phase, p, cell.alpha);
      cell.eta_lstsq_full = sensitivity(SensitivityMethod::lstsq_full, p, cell.alpha);
      cell.eta_lstsq_largealpha = sensitivity(SensitivityMethod::lstsq_largealpha, p, cell.alpha);
      cell.eta_amplitude = sensitivity(SensitivityMethod::amplitude_point, p, cell.alpha);
      cells.push_back(cell);
    }
  }
  return cells;
}

void write_sensitivity_csv(const std::vector<SensitivityCell>& cells, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("write_sensitivity_csv: cannot open: " + path);
  os << "delta_f_win_hz,t_int_s,alpha,emp_std_hz,predicted_std_hz,"
        "eta_emp,eta_demod,eta_lstsq_full,eta_lstsq_largealpha,eta_amplitude\n";
  char buf[360];
  for (const auto& c : cells) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                  c.delta_f_win, c.t_int, c.alpha, c.emp_std_hz, c.predicted_std_hz, c.eta_emp,
                  c.eta_demod, c.eta_lstsq_full, c.eta_lstsq_largealpha, c.eta_amplitude);
    os << buf;
  }
  if (!os) throw std::runtime_error("write_sensitivity_csv: write failed: " + path);
}

double fit_loglog_slope(const std::vector<SensitivityCell>& cells, double delta_f_win) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& c : cells) {
    if (c.delta_f_win != delta_f_win) continue;
    const double x = std::log(c.t_int);
    const double y = std::log(c.emp_std_hz);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) throw std::invalid_argument("fit_loglog_slope: need at least two t_int points");
  const double denom = static_cast<double>(n) * sxx - sx * sx;
  return (static_cast<double>(n) * sxy - sx * sy) / denom;
}

}  // namespace specdemod

// specdemod: simulate, demodulate and benchmark swept spin-resonance
// magnetometry traces. Exit codes: 0 ok, 2 configuration error, 3 numerical
// or I/O failure.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "specdemod/bench.hpp"
#include "specdemod/demod.hpp"
#include "specdemod/gradiometry.hpp"
#include "specdemod/scan.hpp"
#include "specdemod/theory.hpp"
#include "specdemod/trace_io.hpp"
#include "specdemod/tracker.hpp"

namespace sd = specdemod;
namespace fs = std::filesystem;

namespace {

struct CommonOpts {
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  std::string estimator = "phase";

  sd::Estimator estimator_enum() const {
    if (estimator == "phase") return sd::Estimator::phase;
    if (estimator == "lstsq") return sd::Estimator::lstsq;
    throw CLI::ValidationError("--estimator", "must be 'phase' or 'lstsq'");
  }
};

struct ProbeOpts {
  sd::ResonanceParams p;
  sd::SweepConfig sweep;
};

void add_common(CLI::App* cmd, CommonOpts& c) {
  cmd->add_option("--out", c.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--seed", c.seed, "RNG seed")->capture_default_str();
  cmd->add_option("--estimator", c.estimator, "phase|lstsq")->capture_default_str();
}

void add_probe(CLI::App* cmd, ProbeOpts& o) {
  cmd->add_option("--r0", o.p.r0, "PL rate off resonance (counts/s)")->capture_default_str();
  cmd->add_option("--epsilon", o.p.epsilon, "contrast")->capture_default_str();
  cmd->add_option("--gamma", o.p.gamma, "half-linewidth (Hz)")->capture_default_str();
  cmd->add_option("--f0", o.p.f0, "zero-field resonance frequency (Hz)")->capture_default_str();
  cmd->add_option("--fc", o.sweep.f_c, "window center (Hz); defaults to --f0")
      ->default_val("");
  cmd->add_option("--dfwin", o.sweep.delta_f_win, "window span (Hz)")->capture_default_str();
  cmd->add_option("--fmod", o.sweep.f_mod, "saw-tooth rate (Hz)")->capture_default_str();
}

void finalize_probe(const CLI::App* cmd, ProbeOpts& o) {
  if (cmd->count("--fc") == 0) o.sweep.f_c = o.p.f0;
}

fs::path prepare_out(const CLI::App& app, const CommonOpts& c) {
  fs::path dir(c.out_dir);
  fs::create_directories(dir);
  // resolved-config echo for provenance
  std::ofstream os(dir / "resolved_config.ini");
  os << app.config_to_str(true, true);
  return dir;
}

const char* flag_string(const sd::EstimateRecord& r) {
  if (r.no_lock) return "no_lock";
  if (r.ill_conditioned) return "ill_conditioned";
  if (!r.converged) return "not_converged";
  return "ok";
}

void write_estimates_csv(const std::vector<sd::EstimateRecord>& recs, const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string());
  os << "f0_hz,df0_hz,gamma_hz,epsilon,r0_cps,phi_rad,flags\n";
  char buf[256];
  for (const auto& r : recs) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n", r.f0_hat, r.df0,
                  r.gamma_hat, r.epsilon_hat, r.r0_hat, r.phi, flag_string(r));
    os << buf;
  }
}

sd::FieldWaveform make_waveform(const std::string& kind, double amplitude, double start,
                                double ramp_rate) {
  if (kind == "coil") {
    sd::CoilWaveformConfig cfg;
    cfg.amplitude = amplitude;
    cfg.start_s = start;
    return sd::coil_waveform(cfg);
  }
  if (kind == "ramp") return sd::ramp_waveform(ramp_rate, start);
  if (kind == "const") return sd::constant_waveform(amplitude);
  throw CLI::ValidationError("--waveform", "must be coil|ramp|const");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spectrum-demodulation magnetometry simulator and benchmark harness"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from a TOML/INI file");

  // ---- simulate ----
  auto* sim = app.add_subcommand("simulate", "synthesize a photon-count trace");
  CommonOpts sim_c;
  ProbeOpts sim_p;
  double sim_duration = 0.1, sim_dwell = 20e-6, sim_bias = 0.0;
  std::string sim_noise = "shot", sim_format = "csv";
  add_common(sim, sim_c);
  add_probe(sim, sim_p);
  sim->add_option("--duration", sim_duration, "trace length (s)")->capture_default_str();
  sim->add_option("--dwell", sim_dwell, "bin time (s)")->capture_default_str();
  sim->add_option("--bias", sim_bias, "constant field (T)")->capture_default_str();
  sim->add_option("--noise", sim_noise, "shot|none")->capture_default_str();
  sim->add_option("--format", sim_format, "csv|bin")->capture_default_str();

  // ---- demod ----
  auto* dem = app.add_subcommand("demod", "demodulate a trace into estimates");
  CommonOpts dem_c;
  ProbeOpts dem_p;
  std::string dem_in;
  double dem_tint = 10e-3;
  int dem_nmax = 3;
  add_common(dem, dem_c);
  add_probe(dem, dem_p);
  dem->add_option("--in", dem_in, "trace file (csv or .bin)")->required();
  dem->add_option("--t-int", dem_tint, "segment length (s)")->capture_default_str();
  dem->add_option("--n-max", dem_nmax, "highest harmonic")->capture_default_str();

  // ---- track ----
  auto* trk = app.add_subcommand("track", "closed-loop field monitoring run");
  CommonOpts trk_c;
  ProbeOpts trk_p;
  std::string trk_wave = "coil";
  double trk_amp = 0.5e-3, trk_start = 0.5, trk_ramp = 0.0;
  double trk_rate = 50.0, trk_tint = 10e-3, trk_latency = 10e-3, trk_duration = 10.0,
         trk_dwell = 20e-6;
  bool trk_off = false;
  add_common(trk, trk_c);
  add_probe(trk, trk_p);
  trk->add_option("--waveform", trk_wave, "coil|ramp|const")->capture_default_str();
  trk->add_option("--amplitude", trk_amp, "per-tone or constant amplitude (T)")->capture_default_str();
  trk->add_option("--start", trk_start, "waveform start time (s)")->capture_default_str();
  trk->add_option("--ramp-rate", trk_ramp, "ramp rate (T/s)")->capture_default_str();
  trk->add_option("--rate", trk_rate, "sample rate (Hz)")->capture_default_str();
  trk->add_option("--t-int", trk_tint, "integration time (s)")->capture_default_str();
  trk->add_option("--latency", trk_latency, "feedback latency (s)")->capture_default_str();
  trk->add_option("--duration", trk_duration, "run length (s)")->capture_default_str();
  trk->add_option("--dwell", trk_dwell, "bin time (s)")->capture_default_str();
  trk->add_flag("--no-tracking", trk_off, "disable window re-centering");

  // ---- scan ----
  auto* scn = app.add_subcommand("scan", "raster scan over a synthetic field map");
  CommonOpts scn_c;
  ProbeOpts scn_p;
  sd::ScanConfig scan_cfg;
  bool scn_png = false, scn_pgm = false;
  add_common(scn, scn_c);
  add_probe(scn, scn_p);
  scn->add_option("--extent-x", scan_cfg.extent_x, "scan width (m)")->capture_default_str();
  scn->add_option("--extent-y", scan_cfg.extent_y, "scan height (m)")->capture_default_str();
  scn->add_option("--pitch", scan_cfg.pitch, "pixel spacing (m)")->capture_default_str();
  scn->add_option("--rate", scan_cfg.rate, "pixel rate (Hz)")->capture_default_str();
  scn->add_option("--t-int", scan_cfg.t_int, "integration time per pixel (s)")->capture_default_str();
  scn->add_option("--dwell", scan_cfg.dwell, "bin time (s)")->capture_default_str();
  scn->add_option("--bias", scan_cfg.bias_t, "bias field (T)")->capture_default_str();
  scn->add_option("--map-p2p", scan_cfg.map.peak_to_peak_t, "map peak-to-peak (T)")->capture_default_str();
  scn->add_option("--map-feature", scan_cfg.map.feature_size_m, "map feature size (m)")->capture_default_str();
  scn->add_option("--threads", scan_cfg.threads, "worker threads (0 = all)")->capture_default_str();
  scn->add_flag("--tracking", scan_cfg.tracking, "re-center between pixels");
  scn->add_flag("--serpentine", scan_cfg.serpentine, "serpentine raster order");
  scn->add_flag("--png", scn_png, "also write a PNG heatmap");
  scn->add_flag("--pgm", scn_pgm, "also write a PGM16 heatmap");

  // ---- bench-sensitivity ----
  auto* ben = app.add_subcommand("bench-sensitivity", "std vs t_int and eta vs alpha tables");
  CommonOpts ben_c;
  ProbeOpts ben_p;
  std::vector<double> ben_windows{10e6, 20e6, 30e6, 60e6};
  std::vector<double> ben_tints{1e-3, 3e-3, 10e-3, 30e-3, 100e-3};
  int ben_trials = 200;
  double ben_dwell = 20e-6;
  add_common(ben, ben_c);
  add_probe(ben, ben_p);
  ben->add_option("--windows", ben_windows, "delta_f_win grid (Hz)")->capture_default_str();
  ben->add_option("--t-ints", ben_tints, "t_int grid (s)")->capture_default_str();
  ben->add_option("--trials", ben_trials, "trials per cell (>= 100)")->capture_default_str();
  ben->add_option("--dwell", ben_dwell, "bin time (s)")->capture_default_str();

  // ---- gradient ----
  auto* grd = app.add_subcommand("gradient", "tuning-fork gradiometry estimation");
  CommonOpts grd_c;
  ProbeOpts grd_p;
  double grd_ftf = 32e3, grd_x0 = 50e-9, grd_dbdx = 0.0, grd_dphi = -1.0;
  double grd_tint = 100e-3, grd_dwell = 10e-6;
  std::string grd_noise = "shot";
  add_common(grd, grd_c);
  add_probe(grd, grd_p);
  grd->add_option("--f-tf", grd_ftf, "oscillator frequency (Hz)")->capture_default_str();
  grd->add_option("--x0", grd_x0, "oscillation amplitude (m)")->capture_default_str();
  grd->add_option("--db-dx", grd_dbdx, "true field gradient (T/m)")->capture_default_str();
  grd->add_option("--delta-phi", grd_dphi, "override modulation depth (rad)")->capture_default_str();
  grd->add_option("--t-int", grd_tint, "integration time (s)")->capture_default_str();
  grd->add_option("--dwell", grd_dwell, "bin time (s)")->capture_default_str();
  grd->add_option("--noise", grd_noise, "shot|none")->capture_default_str();

  // ---- theory ----
  auto* thr = app.add_subcommand("theory", "print the closed-form figures for given parameters");
  CommonOpts thr_c;
  ProbeOpts thr_p;
  double thr_tint = 10e-3;
  add_common(thr, thr_c);
  add_probe(thr, thr_p);
  thr->add_option("--t-int", thr_tint, "integration time for rate/slew figures (s)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sim) {
      finalize_probe(sim, sim_p);
      const fs::path dir = prepare_out(app, sim_c);
      sd::TraceRequest req;
      req.duration = sim_duration;
      req.dwell = sim_dwell;
      req.noise = sim_noise == "none" ? sd::NoiseMode::none : sd::NoiseMode::shot;
      req.seed = sim_c.seed;
      const auto result =
          sd::synthesize_trace(sim_p.p, sim_p.sweep, sd::constant_waveform(sim_bias), req);
      if (result.duration_rounded)
        std::cerr << "note: duration rounded down to a whole number of sweep periods\n";
      if (result.sweep_period_below_cap)
        std::cerr << "warning: sweep period < 100 us; spin response time is not negligible\n";
      const fs::path file = dir / (sim_format == "bin" ? "trace.bin" : "trace.csv");
      if (sim_format == "bin")
        sd::write_trace_binary(result.trace, file.string());
      else
        sd::write_trace_csv(result.trace, file.string());
      std::cout << file.string() << "\n";
    } else if (*dem) {
      finalize_probe(dem, dem_p);
      const fs::path dir = prepare_out(app, dem_c);
      const sd::PhotonTrace trace = sd::read_trace_auto(dem_in);
      const auto bins_per_seg = static_cast<std::size_t>(std::llround(dem_tint / trace.dwell));
      if (bins_per_seg == 0 || bins_per_seg > trace.bins())
        throw std::invalid_argument("demod: --t-int does not fit the trace");
      std::vector<sd::EstimateRecord> recs;
      for (std::size_t start = 0; start + bins_per_seg <= trace.bins(); start += bins_per_seg) {
        sd::PhotonTrace seg;
        seg.dwell = trace.dwell;
        seg.t0 = trace.t0 + static_cast<double>(start) * trace.dwell;
        seg.counts.assign(trace.counts.begin() + static_cast<std::ptrdiff_t>(start),
                          trace.counts.begin() + static_cast<std::ptrdiff_t>(start + bins_per_seg));
        const sd::HarmonicSet h = sd::demodulate(seg, dem_p.sweep.f_mod, dem_nmax);
        sd::EstimateRecord rec = sd::estimate_all(h, dem_p.sweep);
        if (dem_c.estimator_enum() == sd::Estimator::lstsq)
          rec = sd::harmonic_lstsq(h, dem_p.sweep, rec);
        recs.push_back(rec);
      }
      write_estimates_csv(recs, dir / "estimates.csv");
      std::cout << (dir / "estimates.csv").string() << "\n";
    } else if (*trk) {
      finalize_probe(trk, trk_p);
      const fs::path dir = prepare_out(app, trk_c);
      sd::ClosedLoopConfig cfg;
      cfg.rate = trk_rate;
      cfg.duration = trk_duration;
      cfg.tracking = !trk_off;
      cfg.acquisition.t_int = trk_tint;
      cfg.acquisition.dwell = trk_dwell;
      cfg.acquisition.estimator = trk_c.estimator_enum();
      cfg.acquisition.seed = trk_c.seed;
      cfg.tracker.latency = trk_latency;
      const auto samples = sd::run_closed_loop(
          trk_p.p, trk_p.sweep, make_waveform(trk_wave, trk_amp, trk_start, trk_ramp), cfg);
      std::ofstream os(dir / "track.csv");
      os << "t_s,b_true_T,b_est_T,f_c_hz,window_hz,lock\n";
      char buf[200];
      for (const auto& s : samples) {
        std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", s.t, s.b_true, s.b_est,
                      s.f_c, s.window, s.lock ? 1 : 0);
        os << buf;
      }
      std::cout << (dir / "track.csv").string() << "\n";
    } else if (*scn) {
      finalize_probe(scn, scn_p);
      const fs::path dir = prepare_out(app, scn_c);
      scan_cfg.estimator = scn_c.estimator_enum();
      scan_cfg.seed = scn_c.seed;
      scan_cfg.map.seed = scn_c.seed;
      const sd::FieldImage img = sd::run_scan(scn_p.p, scn_p.sweep, scan_cfg);
      sd::export_image(img, sd::ImageFormat::csv, (dir / "scan.csv").string());
      if (scn_pgm) sd::export_image(img, sd::ImageFormat::pgm16, (dir / "scan.pgm").string());
      if (scn_png) sd::export_image(img, sd::ImageFormat::png, (dir / "scan.png").string());
      std::cout << (dir / "scan.csv").string() << "\n";
    } else if (*ben) {
      finalize_probe(ben, ben_p);
      const fs::path dir = prepare_out(app, ben_c);
      sd::SensitivityBenchConfig cfg;
      cfg.window_sizes = ben_windows;
      cfg.t_ints = ben_tints;
      cfg.n_trials = ben_trials;
      cfg.dwell = ben_dwell;
      cfg.f_mod = ben_p.sweep.f_mod;
      cfg.estimator = ben_c.estimator_enum();
      cfg.seed = ben_c.seed;
      const auto cells = sd::run_sensitivity_sweep(ben_p.p, cfg);
      sd::write_sensitivity_csv(cells, (dir / "sensitivity.csv").string());
      std::cout << (dir / "sensitivity.csv").string() << "\n";
    } else if (*grd) {
      finalize_probe(grd, grd_p);
      const fs::path dir = prepare_out(app, grd_c);
      sd::GradiometryConfig gc;
      gc.f_tf = grd_ftf;
      gc.x0 = grd_x0;
      gc.db_dx = grd_dbdx;
      if (grd_dphi >= 0.0) gc.delta_phi_override = grd_dphi;
      sd::TraceRequest req;
      req.duration = grd_tint;
      req.dwell = grd_dwell;
      req.noise = grd_noise == "none" ? sd::NoiseMode::none : sd::NoiseMode::shot;
      req.seed = grd_c.seed;
      const auto synth = sd::apply_gradient_modulation(grd_p.p, grd_p.sweep, gc,
                                                       sd::constant_waveform(0.0), req);
      const sd::HarmonicSet h = sd::demodulate(synth.trace, grd_p.sweep.f_mod, 2);
      const sd::SidebandSet s = sd::demodulate_sidebands(synth.trace, grd_p.sweep.f_mod, grd_ftf, 2);
      const sd::GradientEstimate g = sd::estimate_gradient(s, h, grd_p.sweep, grd_x0);
      std::ofstream os(dir / "gradient.csv");
      os << "delta_phi,d_delta_phi,b1_T,db1_T,db_dx_T_per_m,ddb_dx_T_per_m,small_angle_ok\n";
      char buf[240];
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", g.delta_phi,
                    g.d_delta_phi, g.b1_tesla, g.db1_tesla, g.db_dx, g.ddb_dx,
                    g.small_angle_ok ? 1 : 0);
      os << buf;
      std::cout << (dir / "gradient.csv").string() << "\n";
    } else if (*thr) {
      finalize_probe(thr, thr_p);
      prepare_out(app, thr_c);
      const double alpha = thr_p.sweep.alpha(thr_p.p);
      char buf[200];
      auto line = [&](const char* k, double v, const char* unit) {
        std::snprintf(buf, sizeof buf, "%-28s %.6g %s\n", k, v, unit);
        std::cout << buf;
      };
      line("alpha", alpha, "");
      line("sweep_rate", thr_p.sweep.sweep_rate(), "Hz/s");
      const auto h = sd::analytic_harmonics(thr_p.p, thr_p.sweep, 3, thr_tint);
      line("a0", h.a[0].real(), "cps");
      line("abs_a1", std::abs(h.a[1]), "cps");
      line("abs_a2", std::abs(h.a[2]), "cps");
      for (auto [m, name] : {std::pair{sd::SensitivityMethod::demod_phase, "eta_demod_phase"},
                             std::pair{sd::SensitivityMethod::amplitude_point, "eta_amplitude"},
                             std::pair{sd::SensitivityMethod::lstsq_full, "eta_lstsq_full"},
                             std::pair{sd::SensitivityMethod::lstsq_largealpha, "eta_lstsq_largealpha"}}) {
        line(name, sd::sensitivity(m, thr_p.p, alpha), "Hz*sqrt(s)");
        std::snprintf(buf, sizeof buf, "%-28s %.6g %s\n",
                      (std::string(name) + "_field").c_str(),
                      sd::sensitivity_field(m, thr_p.p, alpha), "T*sqrt(s)");
        std::cout << buf;
      }
      const auto sr = sd::slew_rate(thr_p.sweep, thr_tint);
      line("slew_rate", sr.hz_per_s, "Hz/s");
      line("slew_rate_field", sr.tesla_per_s, "T/s");
      const auto mr = sd::max_rate(thr_p.p, thr_p.sweep);
      line("max_rate_snr", mr.snr_limited_rate, "1/s");
      line("max_rate_response_cap", mr.response_time_rate, "1/s");
      line("max_rate_binding", mr.binding_rate, "1/s");
      line("random_phase_floor", sd::random_phase_frequency_std(thr_p.sweep.delta_f_win), "Hz");
      line("df0_at_t_int", sd::frequency_uncertainty(h, thr_p.sweep), "Hz");
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "specdemod/field_map.hpp"
#include "specdemod/pipeline.hpp"
#include "specdemod/tracker.hpp"

namespace specdemod {

/// @brief Raster-scan configuration. The sweep window is centered on the
/// bias-field resonance; with tracking enabled it follows the estimates with
/// one pixel period of latency.
struct ScanConfig {
  double origin_x = 0.0, origin_y = 0.0;  ///< lower-left corner (m)
  double extent_x = 5e-6, extent_y = 5e-6;
  double pitch = 50e-9;       ///< pixel spacing (m)
  double rate = 100.0;        ///< pixel rate (Hz)
  double t_int = 10e-3;       ///< integration time per pixel (s), <= 1/rate
  double dwell = 20e-6;
  double bias_t = 2.75e-3;    ///< bias field along the probe axis (T)
  Estimator estimator = Estimator::phase;
  int n_max = 2;
  bool tracking = false;
  bool serpentine = false;
  NoiseMode noise = NoiseMode::shot;
  std::uint64_t seed = 1;
  unsigned threads = 0;       ///< worker count for tracking-off scans; 0 = hardware
  FieldMapConfig map;

  std::size_t pixels_x() const;
  std::size_t pixels_y() const;
  void validate() const;
};

struct FieldImage {
  std::size_t nx = 0, ny = 0;
  std::vector<double> b;       ///< estimated field (T), row-major, includes bias
  std::vector<double> db;      ///< 1-sigma uncertainty (T)
  std::vector<std::uint8_t> lock;
  double sim_acquisition_s = 0.0;  ///< pure pixels/rate time; no move/settle overhead
  ScanConfig cfg;

  double& at(std::size_t ix, std::size_t iy) { return b[iy * nx + ix]; }
  double at(std::size_t ix, std::size_t iy) const { return b[iy * nx + ix]; }
};

/// Scan the synthetic field map. Pixels are independent (and processed by a
/// worker pool) when tracking is off; tracking forces sequential raster
/// order. Deterministic in the seed regardless of thread count: every pixel
/// owns RNG stream (iy * nx + ix).
FieldImage run_scan(const ResonanceParams& p, const SweepConfig& sweep, const ScanConfig& cfg);

enum class ImageFormat { csv, pgm16, png };

/// Write the image. PGM/PNG are 16-bit grayscale, linearly mapped over the
/// image (min, max); the mapping and dimensions go to a "<path>.meta"
/// sidecar. A constant image maps to mid-gray.
void export_image(const FieldImage& img, ImageFormat format, const std::string& path);

/// Reads back the CSV form (grid values only).
FieldImage import_image_csv(const std::string& path);

}  // namespace specdemod

#pragma once

#include <cstdint>

namespace specdemod {

/// @brief Synthetic stray-field map: smooth pseudo-random +/- domains with a
/// configurable feature size and peak-to-peak amplitude. Deterministic in
/// (x, y, seed); no grid is stored, every point is evaluated on demand.
struct FieldMapConfig {
  double feature_size_m = 1e-6;     ///< lateral domain scale
  double peak_to_peak_t = 500e-6;   ///< full field swing between domains
  double wall_softness = 0.35;      ///< domain-wall width relative to feature size
  std::uint64_t seed = 1;
};

double sample_field_map(double x_m, double y_m, const FieldMapConfig& cfg);

}  // namespace specdemod

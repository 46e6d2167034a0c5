#include "specdemod/field_map.hpp"

#include <cmath>
#include <cstdint>

namespace specdemod {

namespace {

std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xbf58476d1ce4e5b9ull;
  z ^= z >> 27;
  z *= 0x94d049bb133111ebull;
  z ^= z >> 31;
  return z;
}

// lattice value in [-1, 1], keyed on integer cell and seed
double lattice_value(std::int64_t ix, std::int64_t iy, std::uint64_t seed, std::uint64_t octave) {
  std::uint64_t h = mix64(seed + 0x9e3779b97f4a7c15ull * octave);
  h = mix64(h ^ (static_cast<std::uint64_t>(ix) * 0xd1342543de82ef95ull));
  h = mix64(h ^ (static_cast<std::uint64_t>(iy) * 0xaf251af3b0f025b5ull));
  return static_cast<double>(h >> 11) * 0x1.0p-52 - 1.0;
}

double quintic(double t) { return t * t * t * (t * (t * 6.0 - 15.0) + 10.0); }

double value_noise(double u, double v, std::uint64_t seed, std::uint64_t octave) {
  const double fu = std::floor(u), fv = std::floor(v);
  const auto ix = static_cast<std::int64_t>(fu);
  const auto iy = static_cast<std::int64_t>(fv);
  const double su = quintic(u - fu);
  const double sv = quintic(v - fv);
  const double v00 = lattice_value(ix, iy, seed, octave);
  const double v10 = lattice_value(ix + 1, iy, seed, octave);
  const double v01 = lattice_value(ix, iy + 1, seed, octave);
  const double v11 = lattice_value(ix + 1, iy + 1, seed, octave);
  const double a = v00 + (v10 - v00) * su;
  const double b = v01 + (v11 - v01) * su;
  return a + (b - a) * sv;
}

}  // namespace

double sample_field_map(double x_m, double y_m, const FieldMapConfig& cfg) {
  if (cfg.peak_to_peak_t == 0.0) return 0.0;
  const double u = x_m / cfg.feature_size_m;
  const double v = y_m / cfg.feature_size_m;
  // two octaves of band-limited noise, then a soft threshold that flattens
  // the interior of each domain while keeping ~feature-size walls smooth
  const double n = value_noise(u, v, cfg.seed, 0) + 0.5 * value_noise(2.0 * u + 17.0, 2.0 * v - 9.0, cfg.seed, 1);
  return 0.5 * cfg.peak_to_peak_t * std::tanh(n / cfg.wall_softness);
}

}  // namespace specdemod

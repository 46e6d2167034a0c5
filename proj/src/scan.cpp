#include "specdemod/scan.hpp"

#include <zlib.h>

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <thread>

namespace specdemod {

std::size_t ScanConfig::pixels_x() const {
  return static_cast<std::size_t>(std::max<long long>(1, std::llround(extent_x / pitch)));
}
std::size_t ScanConfig::pixels_y() const {
  return static_cast<std::size_t>(std::max<long long>(1, std::llround(extent_y / pitch)));
}

void ScanConfig::validate() const {
  if (!(pitch > 0.0)) throw std::invalid_argument("ScanConfig: pitch must be > 0");
  if (!(rate > 0.0)) throw std::invalid_argument("ScanConfig: rate must be > 0");
  if (t_int > 1.0 / rate + 1e-12) throw std::invalid_argument("ScanConfig: t_int exceeds the pixel period");
  if (!(extent_x > 0.0 && extent_y > 0.0)) throw std::invalid_argument("ScanConfig: extents must be > 0");
}

namespace {

struct PixelJob {
  const ResonanceParams* p;
  const SweepConfig* sweep;
  const ScanConfig* cfg;
  FieldImage* img;

  void run(std::size_t ix, std::size_t iy, double f_c, std::uint64_t stream,
           EstimateRecord* rec_out = nullptr) const {
    const double x = cfg->origin_x + static_cast<double>(ix) * cfg->pitch;
    const double y = cfg->origin_y + static_cast<double>(iy) * cfg->pitch;
    const double b_pix = cfg->bias_t + sample_field_map(x, y, cfg->map);

    SweepConfig sw = *sweep;
    sw.f_c = f_c;
    AcquisitionConfig acq;
    acq.t_int = cfg->t_int;
    acq.dwell = cfg->dwell;
    acq.noise = cfg->noise;
    acq.estimator = cfg->estimator;
    acq.n_max = cfg->n_max;
    acq.seed = cfg->seed;

    const EstimateRecord rec =
        acquire_and_estimate(*p, sw, constant_waveform(b_pix), 0.0, stream, acq);
    const std::size_t idx = iy * img->nx + ix;
    img->b[idx] = kGyro.to_field(rec.f0_hat, p->f0);
    img->db[idx] = rec.df0 / kGyro.hz_per_tesla;
    img->lock[idx] = rec.no_lock ? 0 : 1;
    if (rec_out) *rec_out = rec;
  }
};

}  // namespace

FieldImage run_scan(const ResonanceParams& p, const SweepConfig& sweep, const ScanConfig& cfg) {
  p.validate();
  sweep.validate();
  cfg.validate();

  FieldImage img;
  img.cfg = cfg;
  img.nx = cfg.pixels_x();
  img.ny = cfg.pixels_y();
  img.b.assign(img.nx * img.ny, 0.0);
  img.db.assign(img.nx * img.ny, 0.0);
  img.lock.assign(img.nx * img.ny, 0);
  img.sim_acquisition_s = static_cast<double>(img.nx * img.ny) / cfg.rate;

  const double f_c0 = kGyro.to_frequency(cfg.bias_t, p.f0);  // window centered on the bias point
  PixelJob job{&p, &sweep, &cfg, &img};

  if (!cfg.tracking) {
    // pixels are independent: spread rows over a worker pool; the per-pixel
    // RNG stream makes the result identical for any thread count
    unsigned n_threads = cfg.threads ? cfg.threads : std::thread::hardware_concurrency();
    if (n_threads == 0) n_threads = 1;
    std::atomic<std::size_t> next_row{0};
    auto worker = [&]() {
      for (;;) {
        const std::size_t iy = next_row.fetch_add(1);
        if (iy >= img.ny) return;
        for (std::size_t ix = 0; ix < img.nx; ++ix)
          job.run(ix, iy, f_c0, static_cast<std::uint64_t>(iy * img.nx + ix));
      }
    };
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < n_threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return img;
  }

  // tracking: strictly sequential in raster order, window recentered between
  // pixels with one pixel period of feedback latency
  TrackerState state;
  state.f_c = f_c0;
  TrackerConfig tracker;
  tracker.latency = 1.0 / cfg.rate;
  const double t_pixel = 1.0 / cfg.rate;
  std::size_t k = 0;
  for (std::size_t iy = 0; iy < img.ny; ++iy) {
    const bool reversed = cfg.serpentine && (iy % 2 == 1);
    for (std::size_t step = 0; step < img.nx; ++step, ++k) {
      const std::size_t ix = reversed ? img.nx - 1 - step : step;
      const double t_start = static_cast<double>(k) * t_pixel;
      apply_due_updates(state, t_start);
      EstimateRecord rec;
      job.run(ix, iy, state.f_c, static_cast<std::uint64_t>(iy * img.nx + ix), &rec);
      tracker_step(state, rec, t_start + cfg.t_int, tracker);
    }
  }
  return img;
}

namespace {

void write_meta(const FieldImage& img, const std::string& path, double lo, double hi,
                const char* what) {
  std::ofstream os(path + ".meta");
  if (!os) throw std::runtime_error("export_image: cannot open sidecar: " + path + ".meta");
  char buf[256];
  os << "format=" << what << "\n";
  os << "nx=" << img.nx << "\nny=" << img.ny << "\n";
  std::snprintf(buf, sizeof buf, "pitch_m=%.17g\norigin_x_m=%.17g\norigin_y_m=%.17g\n",
                img.cfg.pitch, img.cfg.origin_x, img.cfg.origin_y);
  os << buf;
  std::snprintf(buf, sizeof buf, "map_min_t=%.17g\nmap_max_t=%.17g\n", lo, hi);
  os << buf << "mapping=linear b->gray: gray = 65535*(b-min)/(max-min); constant image -> 32768\n";
  std::snprintf(buf, sizeof buf, "sim_acquisition_s=%.17g\n", img.sim_acquisition_s);
  os << buf << "note=acquisition time is pixels/rate only; no move or settle overhead\n";
}

void range_of(const FieldImage& img, double& lo, double& hi) {
  lo = img.b.empty() ? 0.0 : img.b[0];
  hi = lo;
  for (double v : img.b) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
}

std::vector<std::uint16_t> to_gray16(const FieldImage& img, double lo, double hi) {
  std::vector<std::uint16_t> g(img.b.size());
  const double span = hi - lo;
  for (std::size_t i = 0; i < img.b.size(); ++i) {
    if (span <= 0.0) {
      g[i] = 32768;
      continue;
    }
    double v = 65535.0 * (img.b[i] - lo) / span;
    v = std::clamp(v, 0.0, 65535.0);
    g[i] = static_cast<std::uint16_t>(std::lround(v));
  }
  return g;
}

void put_be32(std::ofstream& os, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v >> 24), static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 8), static_cast<unsigned char>(v)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

void png_chunk(std::ofstream& os, const char type[4], const unsigned char* data, std::size_t len) {
  put_be32(os, static_cast<std::uint32_t>(len));
  os.write(type, 4);
  if (len) os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(len));
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(type), 4);
  if (len) crc = crc32(crc, data, static_cast<uInt>(len));
  put_be32(os, static_cast<std::uint32_t>(crc));
}

void write_png16(const FieldImage& img, const std::vector<std::uint16_t>& gray,
                 const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("export_image: cannot open: " + path);
  static const unsigned char sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
  os.write(reinterpret_cast<const char*>(sig), 8);

  unsigned char ihdr[13];
  const auto w = static_cast<std::uint32_t>(img.nx), h = static_cast<std::uint32_t>(img.ny);
  ihdr[0] = static_cast<unsigned char>(w >> 24); ihdr[1] = static_cast<unsigned char>(w >> 16);
  ihdr[2] = static_cast<unsigned char>(w >> 8);  ihdr[3] = static_cast<unsigned char>(w);
  ihdr[4] = static_cast<unsigned char>(h >> 24); ihdr[5] = static_cast<unsigned char>(h >> 16);
  ihdr[6] = static_cast<unsigned char>(h >> 8);  ihdr[7] = static_cast<unsigned char>(h);
  ihdr[8] = 16;  // bit depth
  ihdr[9] = 0;   // grayscale
  ihdr[10] = ihdr[11] = ihdr[12] = 0;
  png_chunk(os, "IHDR", ihdr, 13);

  std::vector<unsigned char> raw;
  raw.reserve(img.ny * (1 + 2 * img.nx));
  for (std::size_t iy = 0; iy < img.ny; ++iy) {
    raw.push_back(0);  // filter: none
    for (std::size_t ix = 0; ix < img.nx; ++ix) {
      const std::uint16_t v = gray[iy * img.nx + ix];
      raw.push_back(static_cast<unsigned char>(v >> 8));
      raw.push_back(static_cast<unsigned char>(v & 0xff));
    }
  }
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<unsigned char> compressed(bound);
  if (compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
    throw std::runtime_error("export_image: deflate failed: " + path);
  png_chunk(os, "IDAT", compressed.data(), bound);
  png_chunk(os, "IEND", nullptr, 0);
  if (!os) throw std::runtime_error("export_image: write failed: " + path);
}

}  // namespace

void export_image(const FieldImage& img, ImageFormat format, const std::string& path) {
  double lo, hi;
  range_of(img, lo, hi);
  switch (format) {
    case ImageFormat::csv: {
      std::ofstream os(path);
      if (!os) throw std::runtime_error("export_image: cannot open: " + path);
      os << "x_m,y_m,b_T,db_T,lock\n";
      char buf[160];
      for (std::size_t iy = 0; iy < img.ny; ++iy)
        for (std::size_t ix = 0; ix < img.nx; ++ix) {
          const std::size_t i = iy * img.nx + ix;
          std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%d\n",
                        img.cfg.origin_x + static_cast<double>(ix) * img.cfg.pitch,
                        img.cfg.origin_y + static_cast<double>(iy) * img.cfg.pitch, img.b[i],
                        img.db[i], static_cast<int>(img.lock[i]));
          os << buf;
        }
      if (!os) throw std::runtime_error("export_image: write failed: " + path);
      write_meta(img, path, lo, hi, "csv");
      return;
    }
    case ImageFormat::pgm16: {
      const auto gray = to_gray16(img, lo, hi);
      std::ofstream os(path, std::ios::binary);
      if (!os) throw std::runtime_error("export_image: cannot open: " + path);
      os << "P5\n" << img.nx << " " << img.ny << "\n65535\n";
      for (std::uint16_t v : gray) {  // PGM maxval > 255 is big-endian
        const unsigned char b[2] = {static_cast<unsigned char>(v >> 8),
                                    static_cast<unsigned char>(v & 0xff)};
        os.write(reinterpret_cast<const char*>(b), 2);
      }
      if (!os) throw std::runtime_error("export_image: write failed: " + path);
      write_meta(img, path, lo, hi, "pgm16");
      return;
    }
    case ImageFormat::png: {
      write_png16(img, to_gray16(img, lo, hi), path);
      write_meta(img, path, lo, hi, "png");
      return;
    }
  }
  throw std::invalid_argument("export_image: unknown format");
}

FieldImage import_image_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("import_image_csv: cannot open: " + path);
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("import_image_csv: empty file: " + path);

  std::vector<double> xs, ys, bs, dbs;
  std::vector<std::uint8_t> locks;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    double x, y, b, db;
    int lock;
    if (std::sscanf(line.c_str(), "%lg,%lg,%lg,%lg,%d", &x, &y, &b, &db, &lock) != 5)
      throw std::runtime_error("import_image_csv: malformed row in " + path);
    xs.push_back(x);
    ys.push_back(y);
    bs.push_back(b);
    dbs.push_back(db);
    locks.push_back(static_cast<std::uint8_t>(lock));
  }
  FieldImage img;
  std::size_t nx = 1;
  while (nx < xs.size() && ys[nx] == ys[0]) ++nx;
  img.nx = nx;
  img.ny = xs.size() / nx;
  if (img.nx * img.ny != xs.size())
    throw std::runtime_error("import_image_csv: ragged grid in " + path);
  img.b = std::move(bs);
  img.db = std::move(dbs);
  img.lock = std::move(locks);
  return img;
}

}  // namespace specdemod

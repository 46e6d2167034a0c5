#include "specdemod/trace_io.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <limits>
#include <vector>

namespace specdemod {

namespace {

[[noreturn]] void io_fail(const std::string& what, const std::string& path) {
  throw std::runtime_error(what + ": " + path);
}

void put_u64le(std::ofstream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 8);
}

void put_u32le(std::ofstream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint64_t get_u64le(std::ifstream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}

std::uint32_t get_u32le(std::ifstream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}

}  // namespace

void write_trace_csv(const PhotonTrace& trace, const std::string& path) {
  std::ofstream os(path);
  if (!os) io_fail("write_trace_csv: cannot open", path);
  os << "t_start_s,counts\n";
  char buf[64];
  for (std::size_t k = 0; k < trace.counts.size(); ++k) {
    const double t = trace.t0 + static_cast<double>(k) * trace.dwell;
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", t, trace.counts[k]);
    os << buf;
  }
  if (!os) io_fail("write_trace_csv: write failed", path);
}

PhotonTrace read_trace_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) io_fail("read_trace_csv: cannot open", path);
  std::string line;
  if (!std::getline(is, line)) io_fail("read_trace_csv: empty file", path);
  PhotonTrace trace;
  std::vector<double> times;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    double t = 0.0, c = 0.0;
    if (std::sscanf(line.c_str(), "%lg,%lg", &t, &c) != 2)
      io_fail("read_trace_csv: malformed row '" + line + "' in", path);
    times.push_back(t);
    trace.counts.push_back(c);
  }
  if (times.size() < 2) io_fail("read_trace_csv: need at least two bins in", path);
  trace.t0 = times.front();
  trace.dwell = times[1] - times[0];
  if (!(trace.dwell > 0.0)) io_fail("read_trace_csv: non-increasing timestamps in", path);
  return trace;
}

void write_trace_binary(const PhotonTrace& trace, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) io_fail("write_trace_binary: cannot open", path);
  put_u64le(os, trace.counts.size());
  static_assert(sizeof(double) == 8 && std::numeric_limits<double>::is_iec559);
  std::uint64_t dwell_bits;
  std::memcpy(&dwell_bits, &trace.dwell, 8);
  put_u64le(os, dwell_bits);
  for (double c : trace.counts) {
    if (c != std::floor(c) || c < 0.0 || c > 4294967295.0)
      io_fail("write_trace_binary: counts must be integers in [0, 2^32): use CSV for noiseless traces",
              path);
    put_u32le(os, static_cast<std::uint32_t>(c));
  }
  if (!os) io_fail("write_trace_binary: write failed", path);
}

PhotonTrace read_trace_binary(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) io_fail("read_trace_binary: cannot open", path);
  PhotonTrace trace;
  const std::uint64_t n = get_u64le(is);
  const std::uint64_t dwell_bits = get_u64le(is);
  std::memcpy(&trace.dwell, &dwell_bits, 8);
  if (!is || !(trace.dwell > 0.0)) io_fail("read_trace_binary: bad header in", path);
  trace.counts.resize(n);
  for (std::uint64_t k = 0; k < n; ++k) trace.counts[k] = static_cast<double>(get_u32le(is));
  if (!is) io_fail("read_trace_binary: truncated data in", path);
  return trace;
}

PhotonTrace read_trace_auto(const std::string& path) {
  if (path.size() >= 4 && path.compare(path.size() - 4, 4, ".bin") == 0)
    return read_trace_binary(path);
  return read_trace_csv(path);
}

}  // namespace specdemod

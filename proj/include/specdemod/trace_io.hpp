#pragma once

#include <string>

#include "specdemod/simulator.hpp"

namespace specdemod {

/// CSV trace format: header "t_start_s,counts", one row per bin.
void write_trace_csv(const PhotonTrace& trace, const std::string& path);
PhotonTrace read_trace_csv(const std::string& path);

/// Compact binary framing, little-endian: u64 bin count, f64 dwell, then one
/// u32 per bin. Counts must be integers (shot-noise traces); noiseless real
/// traces only round-trip through CSV.
void write_trace_binary(const PhotonTrace& trace, const std::string& path);
PhotonTrace read_trace_binary(const std::string& path);

/// Reads .bin via the binary framing, anything else as CSV.
PhotonTrace read_trace_auto(const std::string& path);

}  // namespace specdemod

#pragma once

// File formats: SWLATT1 field snapshots, CSV traces and the JSON encoding of
// an energy breakdown.
//
// SWLATT1 layout (little-endian):
//   8 bytes   "SWLATT1\0"
//   4 x u32   dims
//   4 x f64   lengths
//   6 x i32   flux vector (m12, m13, m14, m23, m24, m34)
//   links x f64            link angles, index 4*site + mu
//   2*sites x (f64, f64)   spinor components (re, im), index 2*site + c

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "swflow/functional.hpp"
#include "swflow/optimizer.hpp"

namespace swflow {

struct Snapshot {
    Configuration config;
    Flux flux{};
};

std::vector<std::uint8_t> encode_snapshot(const Configuration& c, const Flux& flux);
Snapshot decode_snapshot(const std::vector<std::uint8_t>& bytes);

void write_snapshot(const std::filesystem::path& path, const Configuration& c, const Flux& flux);
Snapshot read_snapshot(const std::filesystem::path& path);

nlohmann::json to_json(const EnergyBreakdown& e);
EnergyBreakdown energy_from_json(const nlohmann::json& j);

// Shortest round-trip decimal form of a double.
std::string format_double(double v);

void write_trace_csv(const std::filesystem::path& path, const std::vector<TraceRow>& rows);

}  // namespace swflow

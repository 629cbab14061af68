#pragma once

// Instance files.
//
// Binary layout, version 1, all integers and floats little-endian:
//
//   char[4]  magic "SPXI"
//   u32      version (1)
//   u32      kind: 1 subspace, 2 decomposition, 3 spiked
//   u64      seed
//   kind 1:  u64 n, u64 d, f64 epsilon, u32 basis_mode (0 rotated, 1 good), u32 zero,
//            f64[n*d] basis (row-major), f64[n] planted, f64[n*d] hidden_good_basis (row-major)
//   kind 2:  u64 d, u64 n, f64[n*d] components (row l is a_l), f64[d^3] tensor (i,j,k), k fastest
//   kind 3:  u64 d, f64 tau, f64[d] spike, f64[d^3] tensor
//
// JSON: {"format": "spectral-instance", "version": 1, "kind": ..., "seed": ..., scalar
// metadata, "arrays": {name: {"shape": [...], "dtype": "<f8", "data": base64}}}.
// Arrays are the same row-major little-endian blocks as in the binary layout.

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"
#include "spectral/instances.hpp"

namespace spectral {

using Instance = std::variant<SubspaceInstance, DecompInstance, SpikeInstance>;

inline constexpr std::uint32_t kInstanceFormatVersion = 1;

void write_instance_binary(std::ostream& out, const Instance& inst);
Instance read_instance_binary(std::istream& in);

nlohmann::json instance_to_json(const Instance& inst);
Instance instance_from_json(const nlohmann::json& doc);

/// Reads either format, detected from the first byte.
Instance load_instance(const std::string& path);
void save_instance(const std::string& path, const Instance& inst, bool as_json);

std::string base64_encode(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> base64_decode(std::string_view text);

}  // namespace spectral

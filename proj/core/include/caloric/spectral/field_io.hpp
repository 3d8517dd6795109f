#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "caloric/spectral/field.hpp"

namespace caloric::spectral {

// Raw field dump: a 32-byte little-endian header
//   bytes  0..3   magic "CSLF"
//   bytes  4..7   u32 format version (1)
//   bytes  8..11  u32 points per side
//   bytes 12..15  u32 component count
//   bytes 16..23  f64 side length
//   bytes 24..31  reserved, zero
// followed by n_components * n * n little-endian f64 values, component-major,
// each component plane row-major (y outer, x inner).
inline constexpr std::uint32_t kFieldDumpVersion = 1;

void write_field_dump(const std::filesystem::path& path, const VecField& field);
VecField read_field_dump(const std::filesystem::path& path);

// Two-column CSV (name,value) with round-trip precision.
void write_norms_csv(const std::filesystem::path& path,
                     const std::vector<std::pair<std::string, double>>& rows);

}  // namespace caloric::spectral

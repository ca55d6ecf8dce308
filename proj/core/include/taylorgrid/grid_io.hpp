#pragma once

#include <filesystem>

#include "taylorgrid/taylor_grid.hpp"

namespace tg {

enum class StoragePrecision : unsigned char { F64 = 0, F32 = 1 };

/// Binary ".tgrid" layout, little-endian:
///   magic "TGRD" | version u32 | dim u8 | order u8 | resolution dim x u32 |
///   origin dim x f64 | extent dim x f64 | precision u8 | coefficient array
/// Coefficients are vertex-major (x fastest, then y, then z) with the
/// per-vertex block layout documented on TaylorGrid. F64 round-trips
/// bit-exactly; F32 narrows on write.
void save_tgrid(const TaylorGrid& grid, const std::filesystem::path& path,
                StoragePrecision precision = StoragePrecision::F64);

TaylorGrid load_tgrid(const std::filesystem::path& path);

/// Exact on-disk size of a grid for a given precision (header + payload).
std::uint64_t tgrid_file_size(const GridSpec& spec, StoragePrecision precision);

}  // namespace tg

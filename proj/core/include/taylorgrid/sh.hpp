#pragma once

#include <array>
#include <filesystem>
#include <span>

#include "taylorgrid/grid_io.hpp"
#include "taylorgrid/grid_spec.hpp"

namespace tg {

inline constexpr int kMaxShBasis = 9;  // degree 2

/// Real spherical harmonics basis values for a unit direction, graphics
/// convention (same constants as Plenoxels-style renderers). Fills
/// (degree+1)^2 entries.
void sh_basis(int degree, const Vec3& dir, std::span<double> out);

/// Dense grid of per-vertex SH coefficients, 3 color channels. Per-vertex
/// layout: [R basis coeffs | G basis coeffs | B basis coeffs].
struct SHColorGrid {
    GridSpec spec;  // order field unused
    int degree = 2;
    std::vector<double> coeffs;

    int basis_count() const { return (degree + 1) * (degree + 1); }
    int channels() const { return 3 * basis_count(); }
};

SHColorGrid init_sh_grid(const GridSpec& spec, int degree);

/// View-dependent color: per-channel SH dot product of multilinearly
/// interpolated coefficients, squashed by a sigmoid into [0,1].
Vec3 sh_color(const SHColorGrid& grid, const Vec3& x, const Vec3& dir);

/// Pre-sigmoid value (parity/basis tests).
Vec3 sh_color_pre(const SHColorGrid& grid, const Vec3& x, const Vec3& dir);

/// Accumulates dL/dcoeffs for upstream dL/dcolor (through the sigmoid, the
/// basis and the interpolation weights). Returns the touched cell.
CellRef sh_color_backprop(const SHColorGrid& grid, const Vec3& x, const Vec3& dir,
                          const Vec3& dl_dcolor, std::span<double> grad);

SHColorGrid upsample_sh(const SHColorGrid& grid, const std::array<int, 3>& new_resolution);

/// ".shgrid" binary format, mirroring ".tgrid" with magic "SHGR" and an SH
/// degree byte in place of the Taylor order.
void save_shgrid(const SHColorGrid& grid, const std::filesystem::path& path,
                 StoragePrecision precision = StoragePrecision::F64);
SHColorGrid load_shgrid(const std::filesystem::path& path);

}  // namespace tg

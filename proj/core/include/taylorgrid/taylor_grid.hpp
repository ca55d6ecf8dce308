#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "taylorgrid/grid_spec.hpp"

namespace tg {

/// Field value and (optionally) its spatial derivative at a query point.
struct EvalResult {
    double value = 0.0;
    Vec3 spatial_gradient{0.0, 0.0, 0.0};
};

enum class InitMode { Zeros, Constant, SmallUniform };

struct InitOptions {
    InitMode mode = InitMode::Zeros;
    double constant = 0.0;       // f0 value for InitMode::Constant
    double epsilon = 1e-4;       // half-range for InitMode::SmallUniform
    std::uint64_t seed = 0;
    std::uint64_t memory_cap_bytes = 4ull << 30;
};

/// Dense grid of per-vertex Taylor coefficient blocks. Block layout per
/// vertex: [f0 | f1 (dim values) | f2 upper triangle, row-major]; the stored
/// f2 entries are raw Hessian values (off-diagonal stored once, applied with
/// multiplicity 2 inside the Taylor polynomial). All offsets x - v are in
/// world units.
struct TaylorGrid {
    GridSpec spec;
    std::vector<double> coeffs;

    std::span<const double> vertex_block(std::int64_t vid) const {
        const int k = spec.coeffs_per_vertex();
        return {coeffs.data() + vid * k, static_cast<std::size_t>(k)};
    }
    std::span<double> vertex_block(std::int64_t vid) {
        const int k = spec.coeffs_per_vertex();
        return {coeffs.data() + vid * k, static_cast<std::size_t>(k)};
    }
};

TaylorGrid init_grid(const GridSpec& spec, const InitOptions& opts = {});

bool all_finite(const TaylorGrid& grid);

/// Blend of per-corner Taylor polynomial evaluations with multilinear weights.
double eval(const TaylorGrid& grid, const Vec3& point);

/// Same value as eval() plus the exact spatial derivative of the blended
/// polynomial (both product-rule terms: weight gradients and per-corner
/// polynomial gradients).
EvalResult eval_with_spatial_gradient(const TaylorGrid& grid, const Vec3& point);

/// Adds upstream * d eval / d coeff to grad for the 2^dim * K coefficients of
/// the containing cell. Returns the cell touched. grad must have
/// grid.coeffs.size() entries.
CellRef backprop_point(const TaylorGrid& grid, const Vec3& point, double upstream,
                       std::span<double> grad);

/// Adds upstream_vec . d(spatial_gradient) / d coeff to grad.
CellRef backprop_spatial_chain(const TaylorGrid& grid, const Vec3& point, const Vec3& upstream_vec,
                               std::span<double> grad);

/// Fused form used by training loops: accumulates both the value chain and
/// the spatial-gradient chain in one pass over the cell corners.
CellRef backprop_value_and_spatial(const TaylorGrid& grid, const Vec3& point, double upstream,
                                   const Vec3& upstream_vec, std::span<double> grad);

/// Channel-wise multilinear resampling of grid data (vertex-major,
/// `channels` values per vertex) onto a finer resolution over the same domain.
std::vector<double> multilinear_resample(const GridSpec& old_geom, std::span<const double> data,
                                         int channels, const std::array<int, 3>& new_resolution);

/// Resample every coefficient channel onto a finer grid; domain unchanged.
/// Throws std::invalid_argument when a resolution shrinks.
TaylorGrid upsample(const TaylorGrid& grid, const std::array<int, 3>& new_resolution);

}  // namespace tg

#pragma once

#include <array>
#include <functional>

#include "taylorgrid/mesh.hpp"
#include "taylorgrid/taylor_grid.hpp"

namespace tg {

/// Dense scalar samples on a vertex lattice (x fastest, then y, then z).
struct ScalarField3 {
    std::array<int, 3> res{2, 2, 2};
    Vec3 origin{-1, -1, -1};
    Vec3 extent{2, 2, 2};
    std::vector<double> values;

    double at(int x, int y, int z) const {
        return values[(static_cast<std::size_t>(z) * res[1] + y) * res[0] + x];
    }
    Vec3 position(int x, int y, int z) const {
        return {origin[0] + extent[0] * x / (res[0] - 1), origin[1] + extent[1] * y / (res[1] - 1),
                origin[2] + extent[2] * z / (res[2] - 1)};
    }
};

struct ScalarField2 {
    std::array<int, 2> res{2, 2};
    std::array<double, 2> origin{-1, -1};
    std::array<double, 2> extent{2, 2};
    std::vector<double> values;

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * res[0] + x]; }
    std::array<double, 2> position(int x, int y) const {
        return {origin[0] + extent[0] * x / (res[0] - 1), origin[1] + extent[1] * y / (res[1] - 1)};
    }
};

/// Sample an arbitrary field on a lattice (used before extraction).
ScalarField3 sample_field3(const std::function<double(const Vec3&)>& field,
                           const std::array<int, 3>& res, const Vec3& origin, const Vec3& extent,
                           int threads = 1);

ScalarField3 sample_grid_field(const TaylorGrid& grid, const std::array<int, 3>& res,
                               int threads = 1);

/// Standard 256-case marching cubes with linear edge interpolation and welded
/// vertices. Triangles are wound so normals point toward positive field
/// values. A field with no zero crossing yields an empty mesh.
TriMesh marching_cubes(const ScalarField3& field, double isolevel = 0.0);

/// 2D contour segments (marching squares; saddles disambiguated with the cell
/// center average).
using Segment2 = std::array<std::array<double, 2>, 2>;
std::vector<Segment2> marching_squares(const ScalarField2& field, double isolevel = 0.0);

}  // namespace tg

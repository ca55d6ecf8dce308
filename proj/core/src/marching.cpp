#include "taylorgrid/marching.hpp"

#include <cmath>
#include <unordered_map>

#include "taylorgrid/errors.hpp"
#include "taylorgrid/parallel.hpp"

namespace tg {

namespace {

// Classic Bourke tables (public domain); bit i of the case index is set when
// corner i lies below the isolevel.
#include "marching_tables.inc"

constexpr int kCorner[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                               {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
constexpr int kEdgeEnds[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                                  {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};

double lerp_t(double va, double vb, double iso) {
    if (va == vb) return 0.5;
    const double t = (iso - va) / (vb - va);
    return t < 0.0 ? 0.0 : (t > 1.0 ? 1.0 : t);
}

}  // namespace

ScalarField3 sample_field3(const std::function<double(const Vec3&)>& field,
                           const std::array<int, 3>& res, const Vec3& origin, const Vec3& extent,
                           int threads) {
    require_arg(res[0] >= 2 && res[1] >= 2 && res[2] >= 2,
                "sample_field3: resolution must be >= 2 per axis");
    ScalarField3 out;
    out.res = res;
    out.origin = origin;
    out.extent = extent;
    out.values.resize(static_cast<std::size_t>(res[0]) * res[1] * res[2]);
    parallel_for(res[2], threads, [&](std::int64_t begin, std::int64_t end, int) {
        for (std::int64_t z = begin; z < end; ++z) {
            std::size_t idx = static_cast<std::size_t>(z) * res[1] * res[0];
            for (int y = 0; y < res[1]; ++y) {
                for (int x = 0; x < res[0]; ++x) {
                    out.values[idx++] = field(out.position(x, y, static_cast<int>(z)));
                }
            }
        }
    });
    return out;
}

ScalarField3 sample_grid_field(const TaylorGrid& grid, const std::array<int, 3>& res,
                               int threads) {
    require_arg(grid.spec.dim == 3, "sample_grid_field: needs a 3D grid");
    return sample_field3([&](const Vec3& p) { return eval(grid, p); }, res, grid.spec.origin,
                         grid.spec.extent, threads);
}

TriMesh marching_cubes(const ScalarField3& field, double isolevel) {
    const auto& res = field.res;
    require_arg(res[0] >= 2 && res[1] >= 2 && res[2] >= 2,
                "marching_cubes: resolution must be >= 2 per axis");
    for (double v : field.values) {
        require_arg(std::isfinite(v), "marching_cubes: field contains non-finite values");
    }

    TriMesh mesh;
    std::unordered_map<std::uint64_t, int> edge_vertex;
    edge_vertex.reserve(1024);

    auto flat = [&](int x, int y, int z) {
        return (static_cast<std::uint64_t>(z) * res[1] + y) * res[0] + x;
    };
    // Welding key: lattice edge = (flat id of the lower endpoint, axis).
    auto edge_key = [&](int x, int y, int z, int corner_a, int corner_b) {
        const int ax = kCorner[corner_a][0], ay = kCorner[corner_a][1], az = kCorner[corner_a][2];
        const int bx = kCorner[corner_b][0], by = kCorner[corner_b][1], bz = kCorner[corner_b][2];
        int axis = 0;
        if (ay != by) axis = 1;
        if (az != bz) axis = 2;
        const int lx = x + std::min(ax, bx);
        const int ly = y + std::min(ay, by);
        const int lz = z + std::min(az, bz);
        return flat(lx, ly, lz) * 3 + axis;
    };

    double corner_val[8];
    int edge_ids[12];
    for (int z = 0; z + 1 < res[2]; ++z) {
        for (int y = 0; y + 1 < res[1]; ++y) {
            for (int x = 0; x + 1 < res[0]; ++x) {
                int case_index = 0;
                for (int c = 0; c < 8; ++c) {
                    corner_val[c] = field.at(x + kCorner[c][0], y + kCorner[c][1], z + kCorner[c][2]);
                    if (corner_val[c] < isolevel) case_index |= 1 << c;
                }
                const int edges = kEdgeTable[case_index];
                if (edges == 0) continue;
                for (int e = 0; e < 12; ++e) {
                    if (!(edges & (1 << e))) continue;
                    const std::uint64_t key = edge_key(x, y, z, kEdgeEnds[e][0], kEdgeEnds[e][1]);
                    auto it = edge_vertex.find(key);
                    if (it == edge_vertex.end()) {
                        const int a = kEdgeEnds[e][0];
                        const int b = kEdgeEnds[e][1];
                        const double t = lerp_t(corner_val[a], corner_val[b], isolevel);
                        const Vec3 pa =
                            field.position(x + kCorner[a][0], y + kCorner[a][1], z + kCorner[a][2]);
                        const Vec3 pb =
                            field.position(x + kCorner[b][0], y + kCorner[b][1], z + kCorner[b][2]);
                        it = edge_vertex.emplace(key, static_cast<int>(mesh.vertices.size())).first;
                        mesh.vertices.push_back(pa + t * (pb - pa));
                    }
                    edge_ids[e] = it->second;
                }
                for (int t = 0; kTriTable[case_index][t] != -1; t += 3) {
                    // Table order points normals at the negative side; swap to
                    // orient them toward positive field values.
                    mesh.triangles.push_back({edge_ids[kTriTable[case_index][t]],
                                              edge_ids[kTriTable[case_index][t + 2]],
                                              edge_ids[kTriTable[case_index][t + 1]]});
                }
            }
        }
    }
    return mesh;
}

std::vector<Segment2> marching_squares(const ScalarField2& field, double isolevel) {
    const auto& res = field.res;
    require_arg(res[0] >= 2 && res[1] >= 2, "marching_squares: resolution must be >= 2 per axis");

    // corner order: 0=(0,0) 1=(1,0) 2=(1,1) 3=(0,1); edges 0..3 = bottom,
    // right, top, left. -1 terminated edge pairs per case; 5/10 split below.
    static constexpr int kCases[16][5] = {
        {-1, -1, -1, -1, -1}, {3, 0, -1, -1, -1},  {0, 1, -1, -1, -1},  {3, 1, -1, -1, -1},
        {1, 2, -1, -1, -1},   {9, 9, 9, 9, -1},    {0, 2, -1, -1, -1},  {3, 2, -1, -1, -1},
        {2, 3, -1, -1, -1},   {0, 2, -1, -1, -1},  {9, 9, 9, 9, -1},    {1, 2, -1, -1, -1},
        {3, 1, -1, -1, -1},   {0, 1, -1, -1, -1},  {3, 0, -1, -1, -1},  {-1, -1, -1, -1, -1}};
    static constexpr int kCornerOff[4][2] = {{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    static constexpr int kEdgeCorners[4][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}};

    std::vector<Segment2> segments;
    double v[4];
    for (int y = 0; y + 1 < res[1]; ++y) {
        for (int x = 0; x + 1 < res[0]; ++x) {
            int case_index = 0;
            for (int c = 0; c < 4; ++c) {
                v[c] = field.at(x + kCornerOff[c][0], y + kCornerOff[c][1]);
                require_arg(std::isfinite(v[c]), "marching_squares: non-finite field value");
                if (v[c] < isolevel) case_index |= 1 << c;
            }
            auto edge_point = [&](int e) {
                const int a = kEdgeCorners[e][0];
                const int b = kEdgeCorners[e][1];
                const double t = lerp_t(v[a], v[b], isolevel);
                const auto pa = field.position(x + kCornerOff[a][0], y + kCornerOff[a][1]);
                const auto pb = field.position(x + kCornerOff[b][0], y + kCornerOff[b][1]);
                return std::array<double, 2>{pa[0] + t * (pb[0] - pa[0]),
                                             pa[1] + t * (pb[1] - pa[1])};
            };
            if (case_index == 5 || case_index == 10) {
                const double center = 0.25 * (v[0] + v[1] + v[2] + v[3]);
                const bool center_inside = center < isolevel;
                // connect the diagonal blob through the center when it is inside
                if ((case_index == 5) == center_inside) {
                    segments.push_back({edge_point(0), edge_point(1)});
                    segments.push_back({edge_point(2), edge_point(3)});
                } else {
                    segments.push_back({edge_point(3), edge_point(0)});
                    segments.push_back({edge_point(1), edge_point(2)});
                }
                continue;
            }
            const int* row = kCases[case_index];
            for (int i = 0; row[i] != -1; i += 2) {
                segments.push_back({edge_point(row[i]), edge_point(row[i + 1])});
            }
        }
    }
    return segments;
}

}  // namespace tg

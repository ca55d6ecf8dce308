#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "taylorgrid/vec.hpp"

namespace tg {

/// Indexed triangle mesh.
struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;

    bool empty() const { return triangles.empty(); }

    void bounds(Vec3& lo, Vec3& hi) const;
    double triangle_area(int t) const;
    Vec3 triangle_normal(int t) const;  // unnormalized (2x area)
    double surface_area() const;
};

struct MeshIngestInfo {
    int dropped_degenerate = 0;
    bool watertight = false;
};

/// Every undirected edge shared by exactly two triangles with opposite
/// orientation (the sign test of the SDF oracle requires this).
bool is_watertight(const TriMesh& mesh);

/// Drops zero-area triangles in place; returns how many were removed.
int drop_degenerate_triangles(TriMesh& mesh);

/// Uniformly scale + translate so the mesh fits [-half_extent, half_extent]^3
/// preserving aspect ratio.
void normalize_to_box(TriMesh& mesh, double half_extent = 0.9);

/// Reads OBJ (v/f records) or STL (binary or ascii), drops degenerate faces,
/// normalizes into [-0.9, 0.9]^3 and reports watertightness. Throws
/// IngestError with diagnostics on malformed or empty input.
TriMesh load_mesh(const std::filesystem::path& path, MeshIngestInfo* info = nullptr);

void save_obj(const TriMesh& mesh, const std::filesystem::path& path);

/// Subdivided icosahedron projected onto a sphere; subdivisions >= 0.
TriMesh make_icosphere(int subdivisions, double radius = 1.0);

/// Axis-aligned box (12 triangles, outward orientation).
TriMesh make_box(const Vec3& center, const Vec3& half_size);

}  // namespace tg

#pragma once

#include <memory>
#include <optional>

#include "taylorgrid/mesh.hpp"

namespace tg {

/// Exact point-to-triangle closest point (Ericson-style region walk).
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

/// Ground-truth signed distance queries against a triangle mesh, backed by a
/// median-split AABB tree. Unsigned distances work on any mesh; the sign test
/// (ray parity, majority over three fixed pseudo-random directions) requires
/// a watertight mesh.
class MeshSdf {
public:
    explicit MeshSdf(TriMesh mesh, std::uint64_t seed = 0x51ed270b);
    ~MeshSdf();
    MeshSdf(MeshSdf&&) noexcept;
    MeshSdf& operator=(MeshSdf&&) noexcept;

    const TriMesh& mesh() const;
    bool watertight() const;

    double unsigned_distance(const Vec3& p) const;
    Vec3 closest_point(const Vec3& p) const;

    /// Negative inside. Throws IngestError directing to unsigned mode when
    /// the mesh is not watertight.
    double signed_distance(const Vec3& p) const;

    /// +1 outside, -1 inside (parity vote).
    int sign(const Vec3& p) const;

    /// Number of triangle intersections along origin + t*dir, t > 0.
    int count_ray_hits(const Vec3& origin, const Vec3& dir) const;

    /// Closest intersection parameter t > 0, if any.
    std::optional<double> first_hit(const Vec3& origin, const Vec3& dir) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace tg

#pragma once

#include <array>
#include <span>
#include <vector>

#include "taylorgrid/vec.hpp"

namespace tg {

/// Pinhole camera. Image convention: +x right, +y down, pixel (i, j) sampled
/// at its center (i + 0.5, j + 0.5); the camera looks along -z in its own
/// frame. `rotation` is the camera-to-world rotation, row-major.
struct Camera {
    double focal_px = 1.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 0;
    int height = 0;
    std::array<double, 9> rotation{1, 0, 0, 0, 1, 0, 0, 0, 1};
    Vec3 position{0.0, 0.0, 0.0};

    /// Throws std::invalid_argument unless focal > 0 and the rotation is
    /// orthonormal to 1e-6.
    void validate() const;

    /// World-space unit direction through pixel-plane coordinates (px, py).
    Vec3 ray_direction(double px, double py) const;

    Vec3 rotate(const Vec3& v) const {
        return {rotation[0] * v[0] + rotation[1] * v[1] + rotation[2] * v[2],
                rotation[3] * v[0] + rotation[4] * v[1] + rotation[5] * v[2],
                rotation[6] * v[0] + rotation[7] * v[1] + rotation[8] * v[2]};
    }

    /// Build from a 4x4 row-major camera-to-world matrix.
    static Camera from_matrix(double focal_px, double cx, double cy, int width, int height,
                              const std::array<double, 16>& cam_to_world);

    /// Camera at `eye` looking at `target`.
    static Camera look_at(double focal_px, int width, int height, const Vec3& eye,
                          const Vec3& target, const Vec3& up = {0.0, 0.0, 1.0});

    std::array<double, 16> to_matrix() const;
};

struct RayBatch {
    std::vector<Vec3> origins;
    std::vector<Vec3> directions;   // unit
    std::vector<Vec3> gt_colors;    // optional; empty when unsupervised
    std::vector<double> near;       // per-ray integration bounds
    std::vector<double> far;

    std::size_t size() const { return origins.size(); }
};

/// Rays through the given pixels (pixel centers). Throws
/// std::invalid_argument for out-of-bounds pixels.
RayBatch generate_rays(const Camera& camera, std::span<const std::array<int, 2>> pixels,
                       double near = 0.0, double far = 1.0);

/// Intersection parameter range of a ray with an axis-aligned box, clipped to
/// [near, far]; empty ranges return false.
bool clip_ray_to_box(const Vec3& origin, const Vec3& dir, const Vec3& lo, const Vec3& hi,
                     double& near, double& far);

}  // namespace tg

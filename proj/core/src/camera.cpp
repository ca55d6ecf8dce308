#include "taylorgrid/camera.hpp"

#include <cmath>
#include <string>

#include "taylorgrid/errors.hpp"

namespace tg {

void Camera::validate() const {
    require_arg(focal_px > 0.0 && std::isfinite(focal_px), "Camera: focal must be > 0");
    require_arg(width > 0 && height > 0, "Camera: image size must be positive");
    // R^T R == I to 1e-6
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            double dot_ij = 0.0;
            for (int k = 0; k < 3; ++k) dot_ij += rotation[k * 3 + i] * rotation[k * 3 + j];
            const double expect = i == j ? 1.0 : 0.0;
            require_arg(std::abs(dot_ij - expect) <= 1e-6,
                        "Camera: rotation is not orthonormal (RtR[" + std::to_string(i) + "][" +
                            std::to_string(j) + "] off by " + std::to_string(dot_ij - expect) + ")");
        }
    }
}

Vec3 Camera::ray_direction(double px, double py) const {
    // +y down in the image maps to -y in the camera frame; camera looks at -z.
    const Vec3 dir_cam{(px - cx) / focal_px, -(py - cy) / focal_px, -1.0};
    return normalized(rotate(dir_cam));
}

Camera Camera::from_matrix(double focal_px, double cx, double cy, int width, int height,
                           const std::array<double, 16>& m) {
    Camera cam;
    cam.focal_px = focal_px;
    cam.cx = cx;
    cam.cy = cy;
    cam.width = width;
    cam.height = height;
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) cam.rotation[r * 3 + c] = m[r * 4 + c];
        cam.position[r] = m[r * 4 + 3];
    }
    return cam;
}

std::array<double, 16> Camera::to_matrix() const {
    std::array<double, 16> m{};
    for (int r = 0; r < 3; ++r) {
        for (int c = 0; c < 3; ++c) m[r * 4 + c] = rotation[r * 3 + c];
        m[r * 4 + 3] = position[r];
    }
    m[15] = 1.0;
    return m;
}

Camera Camera::look_at(double focal_px, int width, int height, const Vec3& eye, const Vec3& target,
                       const Vec3& up) {
    Camera cam;
    cam.focal_px = focal_px;
    cam.width = width;
    cam.height = height;
    cam.cx = width * 0.5;
    cam.cy = height * 0.5;
    cam.position = eye;
    const Vec3 z = normalized(eye - target);  // camera looks along -z
    Vec3 x = cross(up, z);
    if (norm2(x) < 1e-12) x = cross(Vec3{1.0, 0.0, 0.0}, z);
    x = normalized(x);
    const Vec3 y = cross(z, x);
    // columns of camera-to-world are the camera axes in world space
    cam.rotation = {x[0], y[0], z[0], x[1], y[1], z[1], x[2], y[2], z[2]};
    return cam;
}

RayBatch generate_rays(const Camera& camera, std::span<const std::array<int, 2>> pixels,
                       double near, double far) {
    camera.validate();
    require_arg(near < far, "generate_rays: near must be < far");
    RayBatch batch;
    batch.origins.reserve(pixels.size());
    batch.directions.reserve(pixels.size());
    batch.near.assign(pixels.size(), near);
    batch.far.assign(pixels.size(), far);
    for (const auto& px : pixels) {
        require_arg(px[0] >= 0 && px[0] < camera.width && px[1] >= 0 && px[1] < camera.height,
                    "generate_rays: pixel (" + std::to_string(px[0]) + "," +
                        std::to_string(px[1]) + ") out of bounds");
        batch.origins.push_back(camera.position);
        batch.directions.push_back(camera.ray_direction(px[0] + 0.5, px[1] + 0.5));
    }
    return batch;
}

bool clip_ray_to_box(const Vec3& origin, const Vec3& dir, const Vec3& lo, const Vec3& hi,
                     double& near, double& far) {
    double t0 = near;
    double t1 = far;
    for (int a = 0; a < 3; ++a) {
        if (dir[a] == 0.0) {
            if (origin[a] < lo[a] || origin[a] > hi[a]) return false;
            continue;
        }
        const double inv = 1.0 / dir[a];
        double ta = (lo[a] - origin[a]) * inv;
        double tb = (hi[a] - origin[a]) * inv;
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
    }
    if (t0 >= t1) return false;
    near = t0;
    far = t1;
    return true;
}

}  // namespace tg

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "taylorgrid/camera.hpp"
#include "taylorgrid/image.hpp"

namespace tg {

struct SceneView {
    Camera camera;
    ImageRGB image;
    std::string file;
};

/// Posed image collection with shared intrinsics and integration bounds.
struct Scene {
    std::vector<SceneView> views;
    double near = 0.5;
    double far = 8.0;
    Vec3 background{1.0, 1.0, 1.0};
};

/// Directory layout: manifest.json {width, height, focal_px, cx, cy, near,
/// far, background, frames: [{file, transform (4x4 row-major
/// camera-to-world)}]} next to the referenced PNGs.
Scene load_scene(const std::filesystem::path& dir);
void save_scene(const Scene& scene, const std::filesystem::path& dir);

/// Constant-density emissive sphere for the analytic renderer.
struct ToySphere {
    Vec3 center{0.0, 0.0, 0.0};
    double radius = 0.25;
    Vec3 color{1.0, 0.0, 0.0};
    double sigma = 60.0;
};

/// Exact piecewise-constant emission-absorption integral through the spheres
/// (the ground-truth generator for the toy radiance experiments).
ImageRGB analytic_sphere_render(const std::vector<ToySphere>& spheres, const Camera& camera,
                                const Vec3& background);

/// Silhouette mask (1 where any sphere is hit).
ImageGray analytic_sphere_silhouette(const std::vector<ToySphere>& spheres, const Camera& camera);

struct ToySceneSpec {
    int n_views = 20;
    int width = 64;
    int height = 64;
    double focal_scale = 1.3;     // focal_px = focal_scale * width
    double ring_radius = 3.0;
    double near = 1.0;
    double far = 5.5;
    Vec3 background{1.0, 1.0, 1.0};
    std::uint64_t seed = 3;
};

std::vector<ToySphere> toy_spheres();

/// Cameras on a tilted ring around the origin with analytic renders.
Scene make_toy_scene(const ToySceneSpec& spec);

}  // namespace tg

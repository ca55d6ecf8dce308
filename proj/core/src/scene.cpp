#include "taylorgrid/scene.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "taylorgrid/errors.hpp"

namespace tg {

Scene load_scene(const std::filesystem::path& dir) {
    const auto manifest_path = dir / "manifest.json";
    std::ifstream is(manifest_path);
    if (!is) throw IngestError("scene: cannot open " + manifest_path.string());
    nlohmann::json j;
    try {
        is >> j;
    } catch (const nlohmann::json::exception& e) {
        throw IngestError("scene: malformed manifest " + manifest_path.string() + ": " + e.what());
    }
    Scene scene;
    try {
        const int width = j.at("width").get<int>();
        const int height = j.at("height").get<int>();
        const double focal = j.at("focal_px").get<double>();
        const double cx = j.value("cx", width * 0.5);
        const double cy = j.value("cy", height * 0.5);
        scene.near = j.at("near").get<double>();
        scene.far = j.at("far").get<double>();
        if (j.contains("background")) {
            for (int c = 0; c < 3; ++c) scene.background[c] = j["background"].at(c).get<double>();
        }
        for (const auto& frame : j.at("frames")) {
            SceneView view;
            view.file = frame.at("file").get<std::string>();
            std::array<double, 16> m{};
            const auto& t = frame.at("transform");
            if (t.size() != 16) throw IngestError("scene: transform must have 16 entries");
            for (int i = 0; i < 16; ++i) m[i] = t.at(i).get<double>();
            view.camera = Camera::from_matrix(focal, cx, cy, width, height, m);
            view.camera.validate();
            view.image = load_image_rgb(dir / view.file);
            if (view.image.width != width || view.image.height != height) {
                throw IngestError("scene: image size mismatch for " + view.file);
            }
            scene.views.push_back(std::move(view));
        }
    } catch (const nlohmann::json::exception& e) {
        throw IngestError("scene: manifest field error: " + std::string(e.what()));
    }
    if (scene.views.empty()) throw IngestError("scene: no frames in " + manifest_path.string());
    return scene;
}

void save_scene(const Scene& scene, const std::filesystem::path& dir) {
    require_arg(!scene.views.empty(), "save_scene: no views");
    std::filesystem::create_directories(dir);
    const Camera& cam0 = scene.views.front().camera;
    nlohmann::json j;
    j["width"] = cam0.width;
    j["height"] = cam0.height;
    j["focal_px"] = cam0.focal_px;
    j["cx"] = cam0.cx;
    j["cy"] = cam0.cy;
    j["near"] = scene.near;
    j["far"] = scene.far;
    j["background"] = {scene.background[0], scene.background[1], scene.background[2]};
    j["frames"] = nlohmann::json::array();
    int index = 0;
    for (const auto& view : scene.views) {
        std::string file = view.file;
        if (file.empty()) file = "view_" + std::to_string(index) + ".png";
        save_png_rgb(view.image, dir / file);
        j["frames"].push_back({{"file", file}, {"transform", view.camera.to_matrix()}});
        ++index;
    }
    std::ofstream os(dir / "manifest.json");
    if (!os) throw IngestError("scene: cannot write manifest in " + dir.string());
    os << j.dump(1) << '\n';
}

namespace {

struct SegmentEvent {
    double t;
    int sphere;
    bool enter;
};

// Ray/sphere entry-exit parameters, if the ray crosses.
bool sphere_span(const ToySphere& s, const Vec3& o, const Vec3& d, double& t0, double& t1) {
    const Vec3 oc = o - s.center;
    const double b = dot(oc, d);
    const double c = norm2(oc) - s.radius * s.radius;
    const double disc = b * b - c;
    if (disc <= 0.0) return false;
    const double sq = std::sqrt(disc);
    t0 = std::max(0.0, -b - sq);
    t1 = -b + sq;
    return t1 > t0;
}

Vec3 integrate_ray(const std::vector<ToySphere>& spheres, const Vec3& o, const Vec3& d,
                   const Vec3& background) {
    std::vector<SegmentEvent> events;
    for (int i = 0; i < static_cast<int>(spheres.size()); ++i) {
        double t0, t1;
        if (sphere_span(spheres[i], o, d, t0, t1)) {
            events.push_back({t0, i, true});
            events.push_back({t1, i, false});
        }
    }
    if (events.empty()) return background;
    std::sort(events.begin(), events.end(),
              [](const SegmentEvent& a, const SegmentEvent& b) { return a.t < b.t; });

    Vec3 color{0.0, 0.0, 0.0};
    double transmittance = 1.0;
    bool inside[16] = {};
    double prev_t = events.front().t;
    std::size_t e = 0;
    while (e < events.size()) {
        const double seg_end = events[e].t;
        // piecewise-constant medium over [prev_t, seg_end]
        double sigma = 0.0;
        Vec3 emission{0.0, 0.0, 0.0};
        for (int i = 0; i < static_cast<int>(spheres.size()); ++i) {
            if (inside[i]) {
                sigma += spheres[i].sigma;
                emission += spheres[i].sigma * spheres[i].color;
            }
        }
        const double len = seg_end - prev_t;
        if (sigma > 0.0 && len > 0.0) {
            const double absorbed = 1.0 - std::exp(-sigma * len);
            color += transmittance * absorbed * (1.0 / sigma) * emission;
            transmittance *= std::exp(-sigma * len);
        }
        while (e < events.size() && events[e].t == seg_end) {
            inside[events[e].sphere] = events[e].enter;
            ++e;
        }
        prev_t = seg_end;
    }
    return color + transmittance * background;
}

}  // namespace

ImageRGB analytic_sphere_render(const std::vector<ToySphere>& spheres, const Camera& camera,
                                const Vec3& background) {
    require_arg(spheres.size() <= 16, "analytic_sphere_render: too many spheres");
    ImageRGB img;
    img.width = camera.width;
    img.height = camera.height;
    img.pixels.resize(static_cast<std::size_t>(3) * camera.width * camera.height);
    for (int y = 0; y < camera.height; ++y) {
        for (int x = 0; x < camera.width; ++x) {
            const Vec3 dir = camera.ray_direction(x + 0.5, y + 0.5);
            const Vec3 c = integrate_ray(spheres, camera.position, dir, background);
            double* px = img.at(x, y);
            px[0] = c[0];
            px[1] = c[1];
            px[2] = c[2];
        }
    }
    return img;
}

ImageGray analytic_sphere_silhouette(const std::vector<ToySphere>& spheres, const Camera& camera) {
    ImageGray img;
    img.width = camera.width;
    img.height = camera.height;
    img.pixels.assign(static_cast<std::size_t>(camera.width) * camera.height, 0.0);
    for (int y = 0; y < camera.height; ++y) {
        for (int x = 0; x < camera.width; ++x) {
            const Vec3 dir = camera.ray_direction(x + 0.5, y + 0.5);
            for (const auto& s : spheres) {
                double t0, t1;
                if (sphere_span(s, camera.position, dir, t0, t1)) {
                    img.at(x, y) = 1.0;
                    break;
                }
            }
        }
    }
    return img;
}

std::vector<ToySphere> toy_spheres() {
    return {
        {{-0.35, -0.2, -0.15}, 0.28, {0.9, 0.15, 0.12}, 60.0},
        {{0.38, -0.05, 0.1}, 0.24, {0.1, 0.75, 0.2}, 60.0},
        {{0.0, 0.35, 0.3}, 0.2, {0.15, 0.25, 0.9}, 60.0},
    };
}

Scene make_toy_scene(const ToySceneSpec& spec) {
    require_arg(spec.n_views >= 1, "make_toy_scene: need at least one view");
    const auto spheres = toy_spheres();
    Scene scene;
    scene.near = spec.near;
    scene.far = spec.far;
    scene.background = spec.background;
    for (int v = 0; v < spec.n_views; ++v) {
        const double angle = 2.0 * 3.14159265358979323846 * v / spec.n_views;
        const double elevation = 0.35 + 0.25 * std::sin(3.0 * angle);  // tilt variation
        const Vec3 eye{spec.ring_radius * std::cos(angle) * std::cos(elevation),
                       spec.ring_radius * std::sin(angle) * std::cos(elevation),
                       spec.ring_radius * std::sin(elevation)};
        SceneView view;
        view.camera = Camera::look_at(spec.focal_scale * spec.width, spec.width, spec.height, eye,
                                      {0.0, 0.0, 0.0});
        view.image = analytic_sphere_render(spheres, view.camera, spec.background);
        view.file = "view_" + std::to_string(v) + ".png";
        scene.views.push_back(std::move(view));
    }
    return scene;
}

}  // namespace tg

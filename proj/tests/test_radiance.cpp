#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "support/oracles.hpp"
#include "taylorgrid/errors.hpp"
#include "taylorgrid/metrics.hpp"
#include "taylorgrid/nerf_fit.hpp"
#include "taylorgrid/scene.hpp"
#include "taylorgrid/volume_render.hpp"

using namespace tg;
namespace oracle = tg::test;

namespace {

GridSpec density_spec(int res, int order = 2) {
    GridSpec spec;
    spec.dim = 3;
    spec.resolution = {res, res, res};
    spec.order = order;
    return spec;
}

SHColorGrid red_sh_grid(int res, double dc_logit = 40.0) {
    SHColorGrid grid = init_sh_grid(density_spec(res, 0), 0);
    const double c0 = 0.28209479177387814;
    for (std::int64_t v = 0; v < grid.spec.vertex_count(); ++v) {
        grid.coeffs[v * 3 + 0] = dc_logit / c0;    // red saturated high
        grid.coeffs[v * 3 + 1] = -dc_logit / c0;   // green/blue saturated low
        grid.coeffs[v * 3 + 2] = -dc_logit / c0;
    }
    return grid;
}

TaylorGrid constant_density_grid(int res, double sigma) {
    InitOptions opts;
    opts.mode = InitMode::Constant;
    opts.constant = sigma;
    return init_grid(density_spec(res, 0), opts);
}

}  // namespace

TEST_CASE("density activations") {
    const TaylorGrid zero = init_grid(density_spec(4));
    SUBCASE("zero grid with shift -10 is nearly transparent") {
        const double sigma = density(zero, {0.1, 0.2, 0.3}, DensityActivation::ShiftedSoftplus,
                                     -10.0);
        CHECK(sigma == doctest::Approx(std::log1p(std::exp(-10.0))).epsilon(1e-12));
        CHECK(sigma == doctest::Approx(4.5398899216870535e-05).epsilon(1e-9));
    }
    SUBCASE("clamp-relu zeroes negative raw values") {
        InitOptions opts;
        opts.mode = InitMode::Constant;
        opts.constant = -1.0;
        const TaylorGrid g = init_grid(density_spec(4, 0), opts);
        CHECK(density(g, {0, 0, 0}, DensityActivation::ClampRelu) == 0.0);
    }
    SUBCASE("non-negative on random grids") {
        Rng rng(3);
        for (int trial = 0; trial < 5; ++trial) {
            const TaylorGrid g = oracle::random_grid(density_spec(4), 100 + trial, 5.0);
            for (int i = 0; i < 2000; ++i) {
                const Vec3 p = oracle::random_point_in(g.spec, rng);
                CHECK(density(g, p, DensityActivation::ShiftedSoftplus, -2.0) >= 0.0);
                CHECK(density(g, p, DensityActivation::ClampRelu) >= 0.0);
            }
        }
    }
}

TEST_CASE("sh_color") {
    SUBCASE("DC-only coefficients give the constant basis response") {
        SHColorGrid grid = init_sh_grid(density_spec(3, 0), 2);
        const double c = 1.7;
        for (std::int64_t v = 0; v < grid.spec.vertex_count(); ++v) {
            grid.coeffs[v * grid.channels()] = c;  // red DC only
        }
        Rng rng(5);
        for (int i = 0; i < 20; ++i) {
            const Vec3 dir = rng.unit_vector();
            const Vec3 pre = sh_color_pre(grid, {0.2, -0.4, 0.6}, dir);
            CHECK(pre[0] == doctest::Approx(0.28209479177387814 * c).epsilon(1e-9));
            CHECK(pre[1] == 0.0);
            CHECK(pre[2] == 0.0);
        }
    }
    SUBCASE("zero coefficients map to mid-gray through the sigmoid") {
        const SHColorGrid grid = init_sh_grid(density_spec(3, 0), 2);
        const Vec3 c = sh_color(grid, {0, 0, 0}, {0, 0, 1});
        for (int ch = 0; ch < 3; ++ch) CHECK(c[ch] == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("degree-1 terms cancel under direction flip") {
        SHColorGrid grid = init_sh_grid(density_spec(3, 0), 1);
        Rng rng(8);
        for (auto& k : grid.coeffs) k = rng.uniform(-1.0, 1.0);
        for (int i = 0; i < 20; ++i) {
            const Vec3 dir = rng.unit_vector();
            const Vec3 x{0.1, 0.3, -0.2};
            const Vec3 a = sh_color_pre(grid, x, dir);
            const Vec3 b = sh_color_pre(grid, x, {-dir[0], -dir[1], -dir[2]});
            // odd harmonics cancel; twice the DC term remains
            SHColorGrid dc_only = grid;
            for (std::int64_t v = 0; v < grid.spec.vertex_count(); ++v) {
                for (int ch = 0; ch < 3; ++ch) {
                    for (int basis = 1; basis < grid.basis_count(); ++basis) {
                        dc_only.coeffs[(v * 3 + ch) * grid.basis_count() + basis] = 0.0;
                    }
                }
            }
            const Vec3 dc = sh_color_pre(dc_only, x, dir);
            for (int ch = 0; ch < 3; ++ch) {
                CHECK(a[ch] + b[ch] == doctest::Approx(2.0 * dc[ch]).epsilon(1e-9));
            }
        }
    }
    SUBCASE("backprop matches finite differences") {
        SHColorGrid grid = init_sh_grid(density_spec(3, 0), 2);
        Rng rng(21);
        for (auto& k : grid.coeffs) k = rng.uniform(-0.5, 0.5);
        const Vec3 x{0.15, -0.3, 0.45};
        const Vec3 dir = rng.unit_vector();
        const Vec3 upstream{0.7, -0.4, 0.2};
        std::vector<double> grad(grid.coeffs.size(), 0.0);
        sh_color_backprop(grid, x, dir, upstream, grad);
        for (std::size_t i = 0; i < grad.size(); ++i) {
            const double saved = grid.coeffs[i];
            const double h = 1e-6;
            grid.coeffs[i] = saved + h;
            const Vec3 up = sh_color(grid, x, dir);
            grid.coeffs[i] = saved - h;
            const Vec3 down = sh_color(grid, x, dir);
            grid.coeffs[i] = saved;
            const double fd = (dot(upstream, up) - dot(upstream, down)) / (2.0 * h);
            if (grad[i] != 0.0 || std::abs(fd) > 1e-9) {
                CHECK(oracle::rel_err(grad[i], fd, 1e-6) <= 1e-5);
            }
        }
    }
    SUBCASE("shgrid round trip") {
        SHColorGrid grid = init_sh_grid(density_spec(4, 0), 2);
        Rng rng(31);
        for (auto& k : grid.coeffs) k = rng.uniform(-1.0, 1.0);
        const auto path = std::filesystem::temp_directory_path() / "roundtrip.shgrid";
        save_shgrid(grid, path);
        const SHColorGrid loaded = load_shgrid(path);
        CHECK(loaded.degree == grid.degree);
        CHECK(loaded.coeffs == grid.coeffs);
    }
}

TEST_CASE("generate_rays and camera") {
    Camera cam = Camera::look_at(100.0, 64, 64, {0, 0, 3}, {0, 0, 0}, {0, 1, 0});
    cam.validate();
    SUBCASE("principal-point pixel looks along the pose's -z") {
        cam.cx = 32.5;  // center of pixel 32
        cam.cy = 32.5;
        const std::array<int, 2> px{32, 32};
        const RayBatch batch = generate_rays(cam, std::span(&px, 1), 0.1, 10.0);
        const Vec3 minus_z{-cam.rotation[2], -cam.rotation[5], -cam.rotation[8]};
        for (int a = 0; a < 3; ++a) {
            CHECK(batch.directions[0][a] == doctest::Approx(minus_z[a]).epsilon(1e-12));
        }
    }
    SUBCASE("pixels symmetric about the principal point give mirrored directions") {
        cam.cx = 32.0;
        cam.cy = 32.0;
        const std::array<int, 2> a{20, 32};
        const std::array<int, 2> b{43, 32};  // centers 20.5 / 43.5 straddle cx = 32
        const RayBatch ba = generate_rays(cam, std::span(&a, 1), 0.1, 10.0);
        const RayBatch bb = generate_rays(cam, std::span(&b, 1), 0.1, 10.0);
        // mirror through the camera x axis: x components opposite in cam frame
        const Vec3 da = ba.directions[0];
        const Vec3 db = bb.directions[0];
        CHECK(da[2] == doctest::Approx(db[2]).epsilon(1e-9));
        CHECK(da[0] == doctest::Approx(-db[0]).epsilon(1e-9));
    }
    SUBCASE("long focal length collapses the frustum") {
        Camera tele = Camera::look_at(1e6, 64, 64, {0, 0, 3}, {0, 0, 0}, {0, 1, 0});
        const std::array<int, 2> corner{0, 0};
        const RayBatch batch = generate_rays(tele, std::span(&corner, 1), 0.1, 10.0);
        const Vec3 center_dir = tele.ray_direction(32.0, 32.0);
        const double cosang = dot(batch.directions[0], center_dir);
        CHECK(std::acos(std::min(1.0, cosang)) <= 1e-3);
    }
    SUBCASE("out-of-bounds pixels rejected") {
        const std::array<int, 2> bad{64, 0};
        CHECK_THROWS_AS(generate_rays(cam, std::span(&bad, 1), 0.1, 10.0),
                        std::invalid_argument);
    }
    SUBCASE("non-orthonormal rotation rejected") {
        Camera broken = cam;
        broken.rotation[0] = 2.0;
        CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
    }
}

TEST_CASE("render_ray") {
    RenderOptions opts;
    opts.background = {0, 0, 0};
    SUBCASE("N=1 with sigma*delta = ln 2 gives half the color") {
        const double span = 2.0;
        const double sigma = std::log(2.0) / span;
        const TaylorGrid dgrid = constant_density_grid(3, sigma);
        const SHColorGrid sh = red_sh_grid(3);
        opts.n_samples = 1;
        opts.activation = DensityActivation::ClampRelu;
        const auto result =
            render_ray(dgrid, sh, {-1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, -1.0, 1.0, opts);
        CHECK(result.color[0] == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(result.color[1] <= 1e-9);
        CHECK(result.color[2] <= 1e-9);
        CHECK(result.weights.size() == 1);
        CHECK(result.weights[0] == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("zero density renders the background with zero weights") {
        const TaylorGrid dgrid = init_grid(density_spec(3, 0));
        const SHColorGrid sh = red_sh_grid(3);
        opts.n_samples = 16;
        opts.activation = DensityActivation::ClampRelu;
        opts.background = {0.25, 0.5, 0.75};
        const auto result =
            render_ray(dgrid, sh, {-1.0, 0.2, 0.1}, {1.0, 0.0, 0.0}, -1.0, 1.0, opts);
        for (int c = 0; c < 3; ++c) {
            CHECK(result.color[c] == doctest::Approx(opts.background[c]).epsilon(1e-12));
        }
        for (double w : result.weights) CHECK(w == 0.0);
        CHECK(result.residual_transmittance == doctest::Approx(1.0));
    }
    SUBCASE("constant density matches the closed-form integral at N=64") {
        const double sigma = 0.8;
        const TaylorGrid dgrid = constant_density_grid(3, sigma);
        const SHColorGrid sh = red_sh_grid(3);
        opts.n_samples = 64;
        opts.activation = DensityActivation::ClampRelu;
        const double near = -0.9, far = 0.7;
        const auto result = render_ray(dgrid, sh, {-1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, near, far,
                                       opts);
        const double expect_red = 1.0 - std::exp(-sigma * (far - near));
        CHECK(oracle::rel_err(result.color[0], expect_red, 1e-6) <= 1e-3);
        CHECK(result.residual_transmittance ==
              doctest::Approx(std::exp(-sigma * (far - near))).epsilon(1e-9));
    }
    SUBCASE("weights are a partition of unity with the residual") {
        Rng rng(4);
        const TaylorGrid dgrid = oracle::random_grid(density_spec(5), 60, 3.0);
        const SHColorGrid sh = red_sh_grid(3);
        opts.n_samples = 32;
        opts.jitter = true;
        opts.jitter_seed = 9;
        for (int trial = 0; trial < 20; ++trial) {
            const Vec3 origin{-1.5, rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)};
            const auto result = render_ray(dgrid, sh, origin, {1, 0, 0}, 0.3, 2.8, opts,
                                           static_cast<std::uint64_t>(trial));
            double sum = 0.0;
            for (double w : result.weights) {
                CHECK(w >= 0.0);
                sum += w;
            }
            CHECK(sum <= 1.0 + 1e-9);
            CHECK(sum + result.residual_transmittance == doctest::Approx(1.0).epsilon(1e-6));
        }
    }
    SUBCASE("raising density never dims an opaque red scene before compositing") {
        const SHColorGrid sh = red_sh_grid(3);
        opts.n_samples = 24;
        opts.activation = DensityActivation::ClampRelu;
        opts.background = {0, 0, 0};
        double prev = -1.0;
        for (double sigma : {0.1, 0.5, 1.0, 3.0, 8.0}) {
            const TaylorGrid dgrid = constant_density_grid(3, sigma);
            const auto result =
                render_ray(dgrid, sh, {-1.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, -1.0, 1.0, opts);
            CHECK(result.color[0] >= prev - 1e-12);
            prev = result.color[0];
        }
    }
}

TEST_CASE("photometric_loss") {
    SUBCASE("exact prediction gives zero loss") {
        const TaylorGrid dgrid = constant_density_grid(4, 0.7);
        const SHColorGrid sh = red_sh_grid(4);
        RenderOptions opts;
        opts.n_samples = 8;
        opts.activation = DensityActivation::ClampRelu;
        RayBatch batch;
        for (int i = 0; i < 4; ++i) {
            batch.origins.push_back({-1.5, -0.3 + 0.2 * i, 0.1});
            batch.directions.push_back({1, 0, 0});
            batch.near.push_back(0.4);
            batch.far.push_back(2.6);
        }
        for (std::size_t i = 0; i < batch.origins.size(); ++i) {
            batch.gt_colors.push_back(render_ray(dgrid, sh, batch.origins[i], batch.directions[i],
                                                 batch.near[i], batch.far[i], opts,
                                                 static_cast<std::uint64_t>(i))
                                          .color);
        }
        CHECK(photometric_loss(dgrid, sh, batch, opts, {}, {}) <= 1e-24);
    }
    SUBCASE("full gradient matches finite differences") {
        TaylorGrid dgrid = oracle::random_grid(density_spec(4), 404, 1.0);
        SHColorGrid sh = init_sh_grid(density_spec(4, 0), 0);
        Rng rng(11);
        for (auto& k : sh.coeffs) k = rng.uniform(-1.0, 1.0);
        RenderOptions opts;
        opts.n_samples = 8;
        opts.activation = DensityActivation::ShiftedSoftplus;
        opts.softplus_shift = -1.0;
        opts.background = {1, 1, 1};
        RayBatch batch;
        for (int i = 0; i < 4; ++i) {
            const Vec3 origin{-1.4, rng.uniform(-0.6, 0.6), rng.uniform(-0.6, 0.6)};
            Vec3 dir{1.0, rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)};
            dir = normalized(dir);
            batch.origins.push_back(origin);
            batch.directions.push_back(dir);
            batch.near.push_back(0.3);
            batch.far.push_back(2.7);
            batch.gt_colors.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
        }
        std::vector<double> gd(dgrid.coeffs.size(), 0.0);
        std::vector<double> gs(sh.coeffs.size(), 0.0);
        photometric_loss(dgrid, sh, batch, opts, gd, gs);

        double max_err = 0.0;
        for (std::size_t i = 0; i < gd.size(); ++i) {
            const double fd = oracle::fd_coeff(dgrid, i, [&](const TaylorGrid& g) {
                return photometric_loss(g, sh, batch, opts, {}, {});
            });
            max_err = std::max(max_err, std::abs(gd[i] - fd) /
                                            std::max({std::abs(gd[i]), std::abs(fd), 1e-3}));
        }
        for (std::size_t i = 0; i < gs.size(); ++i) {
            const double saved = sh.coeffs[i];
            const double h = 1e-5;
            sh.coeffs[i] = saved + h;
            const double up = photometric_loss(dgrid, sh, batch, opts, {}, {});
            sh.coeffs[i] = saved - h;
            const double down = photometric_loss(dgrid, sh, batch, opts, {}, {});
            sh.coeffs[i] = saved;
            const double fd = (up - down) / (2.0 * h);
            max_err = std::max(max_err, std::abs(gs[i] - fd) /
                                            std::max({std::abs(gs[i]), std::abs(fd), 1e-3}));
        }
        CHECK(max_err <= 1e-4);
    }
    SUBCASE("pulling gt colors toward the render decreases the loss") {
        const TaylorGrid dgrid = constant_density_grid(4, 0.8);
        const SHColorGrid sh = red_sh_grid(4, 1.0);
        RenderOptions opts;
        opts.n_samples = 8;
        opts.activation = DensityActivation::ClampRelu;
        RayBatch batch;
        batch.origins.push_back({-1.5, 0.0, 0.0});
        batch.directions.push_back({1, 0, 0});
        batch.near.push_back(0.5);
        batch.far.push_back(2.5);
        const Vec3 rendered = render_ray(dgrid, sh, batch.origins[0], batch.directions[0], 0.5,
                                         2.5, opts, 0)
                                  .color;
        const Vec3 gt{0.9, 0.1, 0.4};
        batch.gt_colors.push_back(gt);
        const double loss_far = photometric_loss(dgrid, sh, batch, opts, {}, {});
        batch.gt_colors[0] = rendered + 0.5 * (gt - rendered);
        const double loss_near = photometric_loss(dgrid, sh, batch, opts, {}, {});
        CHECK(loss_near < loss_far);
    }
    SUBCASE("threaded gradients match sequential ones") {
        const TaylorGrid dgrid = oracle::random_grid(density_spec(5), 17, 1.0);
        SHColorGrid sh = init_sh_grid(density_spec(4, 0), 1);
        Rng rng(2);
        for (auto& k : sh.coeffs) k = rng.uniform(-0.5, 0.5);
        RenderOptions opts;
        opts.n_samples = 16;
        RayBatch batch;
        for (int i = 0; i < 64; ++i) {
            batch.origins.push_back({-1.5, rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8)});
            batch.directions.push_back(normalized(Vec3{1.0, rng.uniform(-0.3, 0.3), 0.0}));
            batch.near.push_back(0.3);
            batch.far.push_back(2.7);
            batch.gt_colors.push_back({rng.uniform(), rng.uniform(), rng.uniform()});
        }
        std::vector<double> gd1(dgrid.coeffs.size(), 0.0), gs1(sh.coeffs.size(), 0.0);
        std::vector<double> gd2(dgrid.coeffs.size(), 0.0), gs2(sh.coeffs.size(), 0.0);
        const double l1 = photometric_loss(dgrid, sh, batch, opts, gd1, gs1, 1);
        const double l2 = photometric_loss(dgrid, sh, batch, opts, gd2, gs2, 2);
        CHECK(oracle::rel_err(l1, l2, 1e-12) <= 1e-12);
        for (std::size_t i = 0; i < gd1.size(); ++i) {
            CHECK(std::abs(gd1[i] - gd2[i]) <= 1e-12 * std::max(1.0, std::abs(gd1[i])));
        }
        for (std::size_t i = 0; i < gs1.size(); ++i) {
            CHECK(std::abs(gs1[i] - gs2[i]) <= 1e-12 * std::max(1.0, std::abs(gs1[i])));
        }
    }
}

TEST_CASE("render_image") {
    SUBCASE("zero density with white background is all white; renders are reproducible") {
        const TaylorGrid dgrid = init_grid(density_spec(4, 0));
        const SHColorGrid sh = init_sh_grid(density_spec(4, 0), 0);
        const Camera cam = Camera::look_at(80.0, 32, 32, {0, 0, 3}, {0, 0, 0}, {0, 1, 0});
        RenderOptions opts;
        opts.n_samples = 16;
        opts.activation = DensityActivation::ClampRelu;
        opts.background = {1, 1, 1};
        const ImageRGB img = render_image(dgrid, sh, cam, 0.5, 6.0, opts);
        for (double p : img.pixels) CHECK(p == 1.0);

        const auto dir = std::filesystem::temp_directory_path() / "tg_radiance_test";
        std::filesystem::create_directories(dir);
        save_png_rgb(img, dir / "a.png");
        save_png_rgb(render_image(dgrid, sh, cam, 0.5, 6.0, opts), dir / "b.png");
        std::ifstream fa(dir / "a.png", std::ios::binary);
        std::ifstream fb(dir / "b.png", std::ios::binary);
        const std::string ba((std::istreambuf_iterator<char>(fa)), {});
        const std::string bb((std::istreambuf_iterator<char>(fb)), {});
        CHECK(ba == bb);
    }
}

TEST_CASE("scene io and the analytic oracle") {
    SUBCASE("toy scene renders sphere colors where expected") {
        ToySceneSpec spec;
        spec.n_views = 4;
        spec.width = 48;
        spec.height = 48;
        const Scene scene = make_toy_scene(spec);
        REQUIRE(scene.views.size() == 4);
        int colored_pixels = 0;
        for (const auto& view : scene.views) {
            for (std::size_t i = 0; i < view.image.pixels.size(); i += 3) {
                const double r = view.image.pixels[i];
                const double g = view.image.pixels[i + 1];
                const double b = view.image.pixels[i + 2];
                if (std::abs(r - g) > 0.2 || std::abs(g - b) > 0.2) ++colored_pixels;
            }
        }
        CHECK(colored_pixels > 200);  // the spheres are visible
    }
    SUBCASE("manifest round trip preserves poses and images") {
        ToySceneSpec spec;
        spec.n_views = 3;
        spec.width = 24;
        spec.height = 24;
        const Scene scene = make_toy_scene(spec);
        const auto dir = std::filesystem::temp_directory_path() / "tg_scene_test";
        std::filesystem::remove_all(dir);
        save_scene(scene, dir);
        const Scene loaded = load_scene(dir);
        REQUIRE(loaded.views.size() == 3);
        CHECK(loaded.near == scene.near);
        CHECK(loaded.far == scene.far);
        for (std::size_t v = 0; v < loaded.views.size(); ++v) {
            for (int i = 0; i < 9; ++i) {
                CHECK(loaded.views[v].camera.rotation[i] ==
                      doctest::Approx(scene.views[v].camera.rotation[i]).epsilon(1e-12));
            }
            for (int a = 0; a < 3; ++a) {
                CHECK(loaded.views[v].camera.position[a] ==
                      doctest::Approx(scene.views[v].camera.position[a]).epsilon(1e-12));
            }
            // PNG quantization only
            for (std::size_t i = 0; i < loaded.views[v].image.pixels.size(); ++i) {
                CHECK(std::abs(loaded.views[v].image.pixels[i] -
                               scene.views[v].image.pixels[i]) <= 0.5 / 255.0 + 1e-12);
            }
        }
        CHECK_THROWS_AS(load_scene(dir / "missing"), IngestError);
    }
}

TEST_CASE("fit_nerf smoke") {
    SUBCASE("fewer than two views rejected") {
        ToySceneSpec spec;
        spec.n_views = 1;
        spec.width = 16;
        spec.height = 16;
        const Scene scene = make_toy_scene(spec);
        NerfOptions opts;
        opts.density_spec = density_spec(8);
        CHECK_THROWS_AS(fit_nerf(scene, scene, opts), std::invalid_argument);
    }
    SUBCASE("short training run reduces the photometric loss") {
        ToySceneSpec spec;
        spec.n_views = 6;
        spec.width = 24;
        spec.height = 24;
        Scene scene = make_toy_scene(spec);
        Scene holdout;
        holdout.near = scene.near;
        holdout.far = scene.far;
        holdout.background = scene.background;
        holdout.views.push_back(scene.views.back());
        scene.views.pop_back();

        NerfOptions opts;
        opts.density_spec = density_spec(8);
        opts.schedule = Schedule::single({8, 8, 8}, 120);
        opts.sh_resolution = {8, 8, 8};
        opts.sh_degree = 1;
        opts.ray_batch = 256;
        opts.n_samples = 24;
        opts.threads = 2;
        opts.seed = 7;
        const NerfResult result = fit_nerf(scene, holdout, opts);
        REQUIRE(result.trace.size() == 120);
        double early = 0.0, late = 0.0;
        for (int i = 0; i < 20; ++i) {
            early += result.trace[i].loss.fit;
            late += result.trace[result.trace.size() - 20 + i].loss.fit;
        }
        CHECK(late < 0.5 * early);
        CHECK(result.per_view_psnr.size() == 1);
        CHECK(result.holdout_psnr > 10.0);
        CHECK(all_finite(result.density));
    }
}

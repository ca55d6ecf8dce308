#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "run_config.hpp"
#include "taylorgrid/errors.hpp"
#include "taylorgrid/grid_io.hpp"
#include "taylorgrid/image_sdf.hpp"
#include "taylorgrid/marching.hpp"
#include "taylorgrid/metrics.hpp"
#include "taylorgrid/nerf_fit.hpp"
#include "taylorgrid/sample_set.hpp"
#include "taylorgrid/sampling.hpp"
#include "taylorgrid/sdf_fit.hpp"
#include "taylorgrid/sdf_oracle.hpp"

namespace fs = std::filesystem;
using tgcli::json;
using namespace tg;

namespace {

void write_json_file(const json& j, const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw IngestError("cannot write " + path.string());
    os << j.dump(1) << '\n';
}

ScalarField2 sample_grid_field2(const TaylorGrid& grid, int nx, int ny) {
    ScalarField2 field;
    field.res = {nx, ny};
    field.origin = {grid.spec.origin[0], grid.spec.origin[1]};
    field.extent = {grid.spec.extent[0], grid.spec.extent[1]};
    field.values.resize(static_cast<std::size_t>(nx) * ny);
    for (int y = 0; y < ny; ++y) {
        for (int x = 0; x < nx; ++x) {
            const auto p = field.position(x, y);
            field.values[static_cast<std::size_t>(y) * nx + x] = eval(grid, {p[0], p[1], 0.0});
        }
    }
    return field;
}

// Bilinear ground-truth lookup for the 2D pipeline: pixel-center lattice of
// SDF values wrapped in an order-0 grid.
TaylorGrid sdf2d_as_grid(const Sdf2D& sdf) {
    GridSpec spec;
    spec.dim = 2;
    spec.order = 0;
    spec.resolution = {sdf.width, sdf.height, 1};
    spec.origin = {-1.0 + 1.0 / sdf.width, -1.0 + 1.0 / sdf.height, 0.0};
    spec.extent = {2.0 - 2.0 / sdf.width, 2.0 - 2.0 / sdf.height, 1.0};
    TaylorGrid grid;
    grid.spec = spec;
    grid.coeffs = sdf.values;
    return grid;
}

struct CommonArgs {
    std::string config_path;
    std::string out;
    long long seed = -1;
    int threads = -1;
    bool deterministic = false;
    std::vector<std::string> extras;
};

json resolve_config(const CommonArgs& args) {
    json cfg = tgcli::default_config();
    if (!args.config_path.empty()) {
        std::ifstream is(args.config_path);
        if (!is) throw ConfigError("config file not found: " + args.config_path);
        json file_cfg;
        try {
            is >> file_cfg;
        } catch (const json::exception& e) {
            throw ConfigError("malformed config JSON: " + std::string(e.what()));
        }
        tgcli::merge_json(cfg, file_cfg);
    }
    if (!args.out.empty()) cfg["out"] = args.out;
    if (args.seed >= 0) cfg["seed"] = args.seed;
    if (args.threads >= 0) cfg["threads"] = args.threads;
    if (args.deterministic) cfg["deterministic"] = true;
    try {
        tgcli::merge_json(cfg, tgcli::overrides_from_args(args.extras));
    } catch (const json::exception& e) {
        throw ConfigError("bad override: " + std::string(e.what()));
    }
    return cfg;
}

FitOptions fit_options_from(const json& cfg, int dim, const std::array<int, 3>& target) {
    FitOptions opts;
    opts.loss = tgcli::loss_config_from(cfg);
    opts.adam = tgcli::adam_config_from(cfg);
    opts.schedule = tgcli::schedule_from(cfg, target, dim);
    opts.seed = cfg.at("seed").get<std::uint64_t>();
    opts.threads = tgcli::threads_from(cfg);
    return opts;
}

// ---------------------------------------------------------------- fit-sdf --

int cmd_fit_sdf(const json& cfg) {
    const fs::path out_dir = cfg.at("out").get<std::string>();
    const json& sdf_cfg = cfg.at("sdf");
    const std::string mesh_path = sdf_cfg.at("mesh").get<std::string>();
    const std::string points_path = sdf_cfg.at("points").get<std::string>();
    const double sphere_r = sdf_cfg.at("analytic_sphere_radius").get<double>();

    const GridSpec spec = tgcli::grid_spec_from(cfg, 3);
    std::vector<fs::path> inputs;

    SampleSet samples;
    std::unique_ptr<MeshSdf> oracle;
    TriMesh reference_mesh;
    if (!points_path.empty()) {
        inputs.push_back(points_path);
        samples = load_sdfpts(points_path);
    } else if (!mesh_path.empty()) {
        inputs.push_back(mesh_path);
        MeshIngestInfo info;
        reference_mesh = load_mesh(mesh_path, &info);
        if (info.dropped_degenerate > 0) {
            std::cerr << "warning: dropped " << info.dropped_degenerate
                      << " degenerate faces from " << mesh_path << "\n";
        }
        oracle = std::make_unique<MeshSdf>(reference_mesh);
        SamplingConfig scfg;
        scfg.total = sdf_cfg.at("total_samples").get<std::int64_t>();
        for (int i = 0; i < 3; ++i) scfg.ratio[i] = sdf_cfg.at("ratio").at(i).get<int>();
        scfg.sigma_near = sdf_cfg.at("sigma_near").get<double>();
        scfg.seed = cfg.at("seed").get<std::uint64_t>();
        scfg.domain_lo = spec.origin;
        scfg.domain_hi = spec.domain_max();
        samples = sample_points(*oracle, scfg);
    } else if (sphere_r > 0.0) {
        SamplingConfig scfg;
        scfg.total = sdf_cfg.at("total_samples").get<std::int64_t>();
        for (int i = 0; i < 3; ++i) scfg.ratio[i] = sdf_cfg.at("ratio").at(i).get<int>();
        scfg.sigma_near = sdf_cfg.at("sigma_near").get<double>();
        scfg.seed = cfg.at("seed").get<std::uint64_t>();
        scfg.domain_lo = spec.origin;
        scfg.domain_hi = spec.domain_max();
        samples = sample_sphere_points(sphere_r, scfg);
        reference_mesh = make_icosphere(4, sphere_r);
    } else {
        throw ConfigError("fit-sdf needs sdf.mesh, sdf.points or sdf.analytic_sphere_radius");
    }

    tgcli::write_resolved_config(cfg, out_dir, inputs);
    if (sdf_cfg.at("save_points").get<bool>()) save_sdfpts(samples, out_dir / "samples.sdfpts");

    FitOptions opts = fit_options_from(cfg, 3, spec.resolution);
    opts.holdout_fraction = sdf_cfg.at("holdout_fraction").get<double>();

    // metric hook: IoU against the available ground truth
    const std::int64_t iou_n = sdf_cfg.at("eval_iou_samples").get<std::int64_t>();
    FieldFn gt_field;
    if (sphere_r > 0.0) {
        gt_field = [sphere_r](const Vec3& p) { return norm(p) - sphere_r; };
    } else if (oracle) {
        gt_field = [&](const Vec3& p) { return oracle->signed_distance(p); };
    }
    opts.metric_hook = [&](const TaylorGrid& grid) {
        json m;
        if (gt_field) {
            IouOptions io;
            io.samples = iou_n;
            io.seed = cfg.at("seed").get<std::uint64_t>();
            io.domain_lo = spec.origin;
            io.domain_hi = spec.domain_max();
            const auto result = iou([&](const Vec3& p) { return eval(grid, p); }, gt_field, io);
            m["iou"] = result.iou;
            if (result.empty_union) {
                m["iou_empty_union"] = true;
                std::cerr << "warning: IoU union empty, reporting 1.0\n";
            }
        }
        return m;
    };

    FitResult result = fit_sdf(samples, spec, opts);

    // extraction + chamfer
    const int mc_res = sdf_cfg.at("extract_resolution").get<int>();
    const ScalarField3 field =
        sample_grid_field(result.grid, {mc_res, mc_res, mc_res}, opts.threads);
    const TriMesh extracted = marching_cubes(field, 0.0);
    if (extracted.empty()) {
        std::cerr << "warning: no zero crossing found; extracted mesh is empty\n";
    }
    save_obj(extracted, out_dir / "mesh.obj");
    if (!extracted.empty() && !reference_mesh.empty()) {
        result.report.metrics["chamfer_l1"] =
            chamfer_l1(extracted, reference_mesh, sdf_cfg.at("chamfer_points").get<std::int64_t>(),
                       cfg.at("seed").get<std::uint64_t>());
    }

    save_tgrid(result.grid, out_dir / "final.tgrid");
    write_trace_csv(out_dir / "trace.csv", result.trace, "recon");
    result.report.config_echo = cfg;
    write_json_file(result.report.to_json(), out_dir / "report.json");
    write_json_file(result.report.metrics.is_null() ? json::object() : result.report.metrics,
                    out_dir / "metrics.json");
    std::cout << result.report.metrics.dump(1) << "\n";
    return 0;
}

// -------------------------------------------------------------- fit-image --

int cmd_fit_image(const json& cfg) {
    const fs::path out_dir = cfg.at("out").get<std::string>();
    const json& img_cfg = cfg.at("image");
    const std::string path = img_cfg.at("path").get<std::string>();
    if (path.empty()) throw ConfigError("fit-image needs image.path");
    if (!fs::exists(path)) throw IngestError("image not found: " + path);

    const ImageGray img = load_image_gray(path);
    const Sdf2D sdf = image_sdf(img, img_cfg.at("threshold").get<double>());
    const TaylorGrid gt_grid = sdf2d_as_grid(sdf);
    tgcli::write_resolved_config(cfg, out_dir, {path});

    // grid resolution = image resolution / grid_scale
    const int scale = img_cfg.at("grid_scale").get<int>();
    if (scale < 1) throw ConfigError("image.grid_scale must be >= 1");
    GridSpec spec = tgcli::grid_spec_from(cfg, 2);
    spec.dim = 2;
    spec.resolution = {std::max(2, img.width / scale), std::max(2, img.height / scale), 1};
    spec.origin = {-1.0, -1.0, 0.0};
    spec.extent = {2.0, 2.0, 1.0};
    spec.validate();

    // supervision: uniform and contour-concentrated samples with bilinear gt
    SampleSet samples;
    samples.dim = 2;
    samples.source_id = path;
    samples.seed = cfg.at("seed").get<std::uint64_t>();
    Rng rng(samples.seed);
    const std::int64_t total = img_cfg.at("total_samples").get<std::int64_t>();
    std::vector<std::array<int, 2>> boundary;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            if (std::abs(sdf.at_px(x, y)) <= 1.5) boundary.push_back({x, y});
        }
    }
    const double jitter = 3.0 * 2.0 / std::max(img.width, img.height);
    for (std::int64_t i = 0; i < total; ++i) {
        SdfSample s;
        if (i % 3 == 0 || boundary.empty()) {
            s.point = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0), 0.0};
            s.source = SampleSource::Uniform;
        } else {
            const auto& px = boundary[rng.index(boundary.size())];
            s.point = {-1.0 + 2.0 * (px[0] + 0.5) / img.width + jitter * rng.gaussian(),
                       -1.0 + 2.0 * (px[1] + 0.5) / img.height + jitter * rng.gaussian(), 0.0};
            s.point = gt_grid.spec.clamp_point(s.point);
            s.source = SampleSource::NearSurface;
        }
        s.gt_sdf = eval(gt_grid, s.point);
        samples.samples.push_back(s);
        samples.counts[static_cast<int>(s.source)] += 1;
    }

    FitOptions opts = fit_options_from(cfg, 2, spec.resolution);
    opts.holdout_fraction = img_cfg.at("holdout_fraction").get<double>();
    FitResult result = fit_sdf(samples, spec, opts);

    // held-out MSE against the dense transform
    Rng eval_rng(samples.seed ^ 0xabcdef);
    double mse = 0.0;
    const int eval_n = 20000;
    for (int i = 0; i < eval_n; ++i) {
        const Vec3 p{eval_rng.uniform(-1.0, 1.0), eval_rng.uniform(-1.0, 1.0), 0.0};
        const double d = eval(result.grid, p) - eval(gt_grid, p);
        mse += d * d;
    }
    mse /= eval_n;
    result.report.metrics["sdf_mse"] = mse;
    result.report.metrics["grid_resolution"] = spec.resolution[0];

    // contour overlay: marching squares on the fitted grid
    const auto segments = marching_squares(sample_grid_field2(result.grid, img.width, img.height));
    ImageRGB overlay;
    overlay.width = img.width;
    overlay.height = img.height;
    overlay.pixels.resize(static_cast<std::size_t>(3) * img.width * img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double v = img.at(x, y) * 0.6;
            double* px = overlay.at(x, y);
            px[0] = px[1] = px[2] = v;
        }
    }
    auto to_px = [&](const std::array<double, 2>& p) {
        return std::array<int, 2>{
            std::clamp(static_cast<int>((p[0] + 1.0) * 0.5 * img.width), 0, img.width - 1),
            std::clamp(static_cast<int>((p[1] + 1.0) * 0.5 * img.height), 0, img.height - 1)};
    };
    for (const auto& seg : segments) {
        const auto a = to_px(seg[0]);
        const auto b = to_px(seg[1]);
        const int steps = std::max(std::abs(b[0] - a[0]), std::abs(b[1] - a[1])) + 1;
        for (int s = 0; s <= steps; ++s) {
            const int x = a[0] + (b[0] - a[0]) * s / steps;
            const int y = a[1] + (b[1] - a[1]) * s / steps;
            double* px = overlay.at(x, y);
            px[0] = 1.0;
            px[1] = 0.1;
            px[2] = 0.1;
        }
    }
    save_png_rgb(overlay, out_dir / "contour.png");

    // error heatmap (blue = 0 ... red = max)
    ImageRGB heat;
    heat.width = img.width;
    heat.height = img.height;
    heat.pixels.resize(overlay.pixels.size());
    double max_err = 1e-12;
    std::vector<double> err(static_cast<std::size_t>(img.width) * img.height);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const Vec3 p{-1.0 + 2.0 * (x + 0.5) / img.width, -1.0 + 2.0 * (y + 0.5) / img.height,
                         0.0};
            const double e = std::abs(eval(result.grid, p) - eval(gt_grid, p));
            err[static_cast<std::size_t>(y) * img.width + x] = e;
            max_err = std::max(max_err, e);
        }
    }
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const double t = err[static_cast<std::size_t>(y) * img.width + x] / max_err;
            double* px = heat.at(x, y);
            px[0] = t;
            px[1] = 0.2 * (1.0 - std::abs(2.0 * t - 1.0));
            px[2] = 1.0 - t;
        }
    }
    save_png_rgb(heat, out_dir / "heatmap.png");

    save_tgrid(result.grid, out_dir / "final.tgrid");
    write_trace_csv(out_dir / "trace.csv", result.trace, "recon");
    result.report.config_echo = cfg;
    write_json_file(result.report.to_json(), out_dir / "report.json");
    write_json_file(result.report.metrics, out_dir / "metrics.json");
    std::cout << result.report.metrics.dump(1) << "\n";
    return 0;
}

// --------------------------------------------------------------- fit-nerf --

int cmd_fit_nerf(const json& cfg) {
    const fs::path out_dir = cfg.at("out").get<std::string>();
    const json& ncfg = cfg.at("nerf");
    const std::string scene_id = ncfg.at("scene").get<std::string>();
    if (scene_id.empty()) throw ConfigError("fit-nerf needs nerf.scene (directory or 'toy3')");

    fs::path scene_dir;
    std::vector<fs::path> inputs;
    if (scene_id == "toy3") {
        ToySceneSpec tspec;
        tspec.n_views = ncfg.at("toy_views").get<int>();
        tspec.width = tspec.height = ncfg.at("toy_size").get<int>();
        tspec.seed = cfg.at("seed").get<std::uint64_t>();
        scene_dir = out_dir / "scene";
        save_scene(make_toy_scene(tspec), scene_dir);
    } else {
        scene_dir = scene_id;
        if (!fs::exists(scene_dir / "manifest.json")) {
            throw IngestError("scene manifest not found: " + (scene_dir / "manifest.json").string());
        }
        inputs.push_back(scene_dir / "manifest.json");
    }
    Scene full = load_scene(scene_dir);
    tgcli::write_resolved_config(cfg, out_dir, inputs);

    const int holdout_n = ncfg.at("holdout_views").get<int>();
    if (holdout_n < 1 || holdout_n >= static_cast<int>(full.views.size())) {
        throw ConfigError("nerf.holdout_views must be in [1, views-1]");
    }
    Scene train = full;
    Scene holdout = full;
    holdout.views.assign(full.views.end() - holdout_n, full.views.end());
    train.views.resize(full.views.size() - holdout_n);

    NerfOptions opts;
    opts.density_spec = tgcli::grid_spec_from(cfg, 3);
    opts.schedule = tgcli::schedule_from(cfg, opts.density_spec.resolution, 3);
    // schedule.total_steps governs SDF fits; the nerf step budget is its own knob
    if (cfg.at("schedule").at("stages").empty()) {
        opts.schedule = Schedule::progressive(opts.density_spec.resolution, 3,
                                              ncfg.at("total_steps").get<int>());
    }
    opts.sh_degree = ncfg.at("sh_degree").get<int>();
    for (int a = 0; a < 3; ++a) {
        opts.sh_resolution[a] = ncfg.at("sh_resolution").at(a).get<int>();
    }
    const std::string act = ncfg.at("activation").get<std::string>();
    if (act == "shifted-softplus") {
        opts.activation = DensityActivation::ShiftedSoftplus;
    } else if (act == "clamp-relu") {
        opts.activation = DensityActivation::ClampRelu;
    } else {
        throw ConfigError("nerf.activation must be shifted-softplus or clamp-relu");
    }
    opts.softplus_shift = ncfg.at("softplus_shift").get<double>();
    opts.lr_density = ncfg.at("lr_density").get<double>();
    opts.lr_sh = ncfg.at("lr_sh").get<double>();
    opts.adam = tgcli::adam_config_from(cfg);
    opts.ray_batch = ncfg.at("ray_batch").get<int>();
    opts.n_samples = ncfg.at("n_samples").get<int>();
    opts.lambda_tv_density = ncfg.at("lambda_tv_density").get<double>();
    opts.jitter = ncfg.at("jitter").get<bool>();
    opts.seed = cfg.at("seed").get<std::uint64_t>();
    opts.threads = tgcli::threads_from(cfg);

    NerfResult result = fit_nerf(train, holdout, opts);

    RenderOptions ropts;
    ropts.n_samples = opts.n_samples;
    ropts.activation = opts.activation;
    ropts.softplus_shift = opts.softplus_shift;
    ropts.background = full.background;
    fs::create_directories(out_dir / "renders");
    for (std::size_t v = 0; v < holdout.views.size(); ++v) {
        const ImageRGB img = render_image(result.density, result.sh, holdout.views[v].camera,
                                          holdout.near, holdout.far, ropts, opts.threads);
        save_png_rgb(img, out_dir / "renders" / ("holdout_" + std::to_string(v) + ".png"));
    }

    save_tgrid(result.density, out_dir / "final.tgrid");
    save_shgrid(result.sh, out_dir / "final.shgrid");
    write_trace_csv(out_dir / "trace.csv", result.trace, "photo");
    json report = result.report;
    report["config"] = cfg;
    write_json_file(report, out_dir / "report.json");
    json metrics;
    metrics["psnr"] = result.holdout_psnr;
    metrics["per_view_psnr"] = result.per_view_psnr;
    write_json_file(metrics, out_dir / "metrics.json");
    std::cout << metrics.dump(1) << "\n";
    return 0;
}

// ----------------------------------------------------------------- render --

int cmd_render(const json& cfg) {
    const fs::path out_dir = cfg.at("out").get<std::string>();
    const json& rcfg = cfg.at("render");
    const std::string tgrid_path = rcfg.at("tgrid").get<std::string>();
    const std::string shgrid_path = rcfg.at("shgrid").get<std::string>();
    const std::string scene_path = rcfg.at("scene").get<std::string>();
    if (tgrid_path.empty() || shgrid_path.empty() || scene_path.empty()) {
        throw ConfigError("render needs render.tgrid, render.shgrid and render.scene");
    }
    if (!fs::exists(tgrid_path)) throw IngestError("tgrid not found: " + tgrid_path);
    if (!fs::exists(shgrid_path)) throw IngestError("shgrid not found: " + shgrid_path);

    const TaylorGrid density = load_tgrid(tgrid_path);
    const SHColorGrid sh = load_shgrid(shgrid_path);
    const Scene scene = load_scene(scene_path);
    const int view = rcfg.at("view").get<int>();
    if (view < 0 || view >= static_cast<int>(scene.views.size())) {
        throw ConfigError("render.view out of range");
    }
    tgcli::write_resolved_config(cfg, out_dir, {tgrid_path, shgrid_path});

    const json& ncfg = cfg.at("nerf");
    RenderOptions ropts;
    ropts.n_samples = ncfg.at("n_samples").get<int>();
    ropts.activation = ncfg.at("activation").get<std::string>() == "clamp-relu"
                           ? DensityActivation::ClampRelu
                           : DensityActivation::ShiftedSoftplus;
    ropts.softplus_shift = ncfg.at("softplus_shift").get<double>();
    ropts.background = scene.background;

    const ImageRGB img = render_image(density, sh, scene.views[view].camera, scene.near, scene.far,
                                      ropts, tgcli::threads_from(cfg));
    std::string out_png = rcfg.at("out_png").get<std::string>();
    if (out_png.empty()) out_png = (out_dir / "render.png").string();
    save_png_rgb(img, out_png);
    const double view_psnr = psnr(img, scene.views[view].image);
    json metrics{{"psnr_vs_view", view_psnr}, {"out", out_png}};
    write_json_file(metrics, out_dir / "metrics.json");
    std::cout << metrics.dump(1) << "\n";
    return 0;
}

// ----------------------------------------------------------- extract-mesh --

int cmd_extract(const json& cfg) {
    const fs::path out_dir = cfg.at("out").get<std::string>();
    const json& ecfg = cfg.at("extract");
    const std::string tgrid_path = ecfg.at("tgrid").get<std::string>();
    if (tgrid_path.empty()) throw ConfigError("extract-mesh needs extract.tgrid");
    if (!fs::exists(tgrid_path)) throw IngestError("tgrid not found: " + tgrid_path);

    const TaylorGrid grid = load_tgrid(tgrid_path);
    if (grid.spec.dim != 3) throw ConfigError("extract-mesh needs a 3D grid");
    tgcli::write_resolved_config(cfg, out_dir, {tgrid_path});

    const int res = ecfg.at("resolution").get<int>();
    const double iso = ecfg.at("isolevel").get<double>();
    const ScalarField3 field =
        sample_grid_field(grid, {res, res, res}, tgcli::threads_from(cfg));
    const TriMesh mesh = marching_cubes(field, iso);
    std::string out_obj = ecfg.at("out_obj").get<std::string>();
    if (out_obj.empty()) out_obj = (out_dir / "mesh.obj").string();
    save_obj(mesh, out_obj);
    json metrics{{"vertices", mesh.vertices.size()},
                 {"triangles", mesh.triangles.size()},
                 {"empty", mesh.empty()},
                 {"out", out_obj}};
    if (mesh.empty()) std::cerr << "warning: field has no zero crossing at isolevel " << iso << "\n";
    write_json_file(metrics, out_dir / "metrics.json");
    std::cout << metrics.dump(1) << "\n";
    return 0;
}

// ------------------------------------------------------------------- eval --

int cmd_eval(const json& cfg) {
    const json& ecfg = cfg.at("eval");
    json metrics = json::object();
    const auto str = [&](const char* key) { return ecfg.at(key).get<std::string>(); };

    const std::uint64_t seed = cfg.at("seed").get<std::uint64_t>();
    if (!str("mesh_a").empty() && !str("mesh_b").empty()) {
        for (const char* key : {"mesh_a", "mesh_b"}) {
            if (!fs::exists(str(key))) throw IngestError("mesh not found: " + str(key));
        }
        const TriMesh a = load_mesh(str("mesh_a"));
        const TriMesh b = load_mesh(str("mesh_b"));
        metrics["chamfer_l1"] =
            chamfer_l1(a, b, ecfg.at("chamfer_points").get<std::int64_t>(), seed);
    }
    auto grid_field = [](const TaylorGrid& g) {
        return [&g](const Vec3& p) { return eval(g, p); };
    };
    std::optional<TaylorGrid> grid_a, grid_b;
    if (!str("grid_a").empty()) {
        if (!fs::exists(str("grid_a"))) throw IngestError("tgrid not found: " + str("grid_a"));
        grid_a = load_tgrid(str("grid_a"));
    }
    if (!str("grid_b").empty()) {
        if (!fs::exists(str("grid_b"))) throw IngestError("tgrid not found: " + str("grid_b"));
        grid_b = load_tgrid(str("grid_b"));
    }
    if (grid_a) {
        IouOptions io;
        io.samples = ecfg.at("iou_samples").get<std::int64_t>();
        io.seed = seed;
        io.domain_lo = grid_a->spec.origin;
        io.domain_hi = grid_a->spec.domain_max();
        if (grid_b) {
            metrics["iou"] = iou(grid_field(*grid_a), grid_field(*grid_b), io).iou;
        } else if (!str("mesh_b").empty()) {
            const TriMesh ref = load_mesh(str("mesh_b"));
            const MeshSdf oracle(ref);
            metrics["iou"] =
                iou(grid_field(*grid_a),
                    [&](const Vec3& p) { return oracle.signed_distance(p); }, io)
                    .iou;
        }
    }
    if (!str("image_a").empty() && !str("image_b").empty()) {
        for (const char* key : {"image_a", "image_b"}) {
            if (!fs::exists(str(key))) throw IngestError("image not found: " + str(key));
        }
        metrics["psnr"] = psnr(load_image_rgb(str("image_a")), load_image_rgb(str("image_b")));
    }
    if (metrics.empty()) {
        throw ConfigError("eval needs at least one artifact pair (meshes, grids or images)");
    }
    std::cout << metrics.dump(1) << "\n";
    return 0;
}

// ------------------------------------------------------------------ bench --

int cmd_bench(const json& cfg) {
    const fs::path out_dir = cfg.at("out").get<std::string>();
    const json& bcfg = cfg.at("bench");
    tgcli::write_resolved_config(cfg, out_dir, {});
    const int res = bcfg.at("resolution").get<int>();
    const int total_steps = bcfg.at("total_steps").get<int>();
    const double target_iou = bcfg.at("target_iou").get<double>();
    const int probe_every = bcfg.at("probe_every").get<int>();
    const std::int64_t probe_samples = bcfg.at("probe_samples").get<std::int64_t>();
    const double radius = 0.5;
    const int threads = tgcli::threads_from(cfg);

    SamplingConfig scfg;
    scfg.total = bcfg.at("samples").get<std::int64_t>();
    scfg.seed = cfg.at("seed").get<std::uint64_t>();
    const SampleSet samples = sample_sphere_points(radius, scfg);

    const auto gt = [radius](const Vec3& p) { return norm(p) - radius; };
    LossConfig loss = tgcli::loss_config_from(cfg);
    const AdamConfig adam = tgcli::adam_config_from(cfg);

    struct Row {
        int order;
        int params_per_vertex;
        std::int64_t total_params;
        double time_to_target = -1.0;
        double final_iou = 0.0;
        double final_loss = 0.0;
    };
    std::vector<Row> rows;
    for (const auto& oj : bcfg.at("orders")) {
        const int order = oj.get<int>();
        GridSpec spec;
        spec.dim = 3;
        spec.resolution = {res, res, res};
        spec.order = order;
        TaylorGrid grid = init_grid(spec);
        AdamState state(grid.coeffs.size(), adam);
        std::vector<double> grad(grid.coeffs.size());
        Rng rng(scfg.seed ^ (0xb0 + order));
        std::vector<SdfSample> batch(loss.batch_size);

        Row row;
        row.order = order;
        row.params_per_vertex = coeff_count(order, 3);
        row.total_params = static_cast<std::int64_t>(grid.coeffs.size());
        IouOptions io;
        io.samples = probe_samples;
        io.seed = scfg.seed;

        double loss_value = 0.0;
        const auto t0 = std::chrono::steady_clock::now();
        for (int step = 0; step < total_steps; ++step) {
            for (auto& s : batch) s = samples.samples[rng.index(samples.samples.size())];
            std::fill(grad.begin(), grad.end(), 0.0);
            const LossTerms terms = total_loss(grid, batch, loss, grad, threads, &rng);
            loss_value = terms.total;
            adam_step(grid.coeffs, grad, state, threads);
            if (row.time_to_target < 0.0 && (step + 1) % probe_every == 0) {
                const double v =
                    iou([&](const Vec3& p) { return eval(grid, p); }, gt, io).iou;
                if (v >= target_iou) {
                    row.time_to_target =
                        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                            .count();
                }
            }
        }
        IouOptions fio = io;
        fio.samples = 100000;
        row.final_iou = iou([&](const Vec3& p) { return eval(grid, p); }, gt, fio).iou;
        row.final_loss = loss_value;
        rows.push_back(row);
    }

    std::string csv = "order,params_per_vertex,total_params,time_to_target_s,final_iou,final_loss\n";
    std::printf("%-6s %-16s %-13s %-17s %-10s\n", "order", "params/vertex", "params", "t_to_iou(s)",
                "final IoU");
    for (const auto& r : rows) {
        char line[256];
        std::snprintf(line, sizeof(line), "%d,%d,%lld,%.3f,%.6f,%.8g\n", r.order,
                      r.params_per_vertex, static_cast<long long>(r.total_params),
                      r.time_to_target, r.final_iou, r.final_loss);
        csv += line;
        std::printf("%-6d %-16d %-13lld %-17.3f %-10.4f\n", r.order, r.params_per_vertex,
                    static_cast<long long>(r.total_params), r.time_to_target, r.final_iou);
    }
    std::ofstream os(out_dir / "bench.csv");
    os << csv;

    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].params_per_vertex <= rows[i - 1].params_per_vertex) {
            throw NumericalError("bench: parameter counts must grow with the order");
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"taylorgrid: direct Taylor-coefficient grid optimization for implicit fields"};
    app.require_subcommand(1);

    CommonArgs args;
    const std::vector<std::pair<std::string, std::string>> commands = {
        {"fit-sdf", "Fit a signed distance field from a mesh, .sdfpts file or analytic sphere"},
        {"fit-image", "Fit a 2D image SDF and write contour/heatmap PNGs"},
        {"fit-nerf", "Fit the toy radiance pipeline on a posed-image scene"},
        {"render", "Render a view from saved density + SH grids"},
        {"extract-mesh", "Run marching cubes on a saved .tgrid"},
        {"eval", "Compute IoU / Chamfer-L1 / PSNR between artifacts"},
        {"bench", "Order sweep on the sphere fixture (params / time / quality)"},
    };
    for (const auto& [name, desc] : commands) {
        auto* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", args.config_path, "JSON config file");
        sub->add_option("--out", args.out, "output directory");
        sub->add_option("--seed", args.seed, "RNG seed");
        sub->add_option("--threads", args.threads, "thread cap (0 = hardware)");
        sub->add_flag("--deterministic", args.deterministic,
                      "sequential reductions for bit-reproducible runs");
        sub->allow_extras();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        CLI::App* sub = app.get_subcommands().front();
        args.extras = sub->remaining();
        const json cfg = resolve_config(args);
        const std::string name = sub->get_name();
        if (name == "fit-sdf") return cmd_fit_sdf(cfg);
        if (name == "fit-image") return cmd_fit_image(cfg);
        if (name == "fit-nerf") return cmd_fit_nerf(cfg);
        if (name == "render") return cmd_render(cfg);
        if (name == "extract-mesh") return cmd_extract(cfg);
        if (name == "eval") return cmd_eval(cfg);
        if (name == "bench") return cmd_bench(cfg);
        std::cerr << "unknown command\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const IngestError& e) {
        std::cerr << "ingestion error: " << e.what() << "\n";
        return 3;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

#include "taylorgrid/nerf_fit.hpp"

#include <chrono>
#include <cmath>

#include "taylorgrid/errors.hpp"
#include "taylorgrid/metrics.hpp"
#include "taylorgrid/sdf_loss.hpp"

namespace tg {

NerfResult fit_nerf(const Scene& train, const Scene& holdout, const NerfOptions& options) {
    require_arg(train.views.size() >= 2, "fit_nerf: need at least 2 training views");
    options.density_spec.validate();
    require_arg(options.ray_batch > 0 && options.n_samples > 0, "fit_nerf: bad batch settings");

    // Flatten all training rays once; minibatches are index draws.
    const Vec3 lo = options.density_spec.origin;
    const Vec3 hi = options.density_spec.domain_max();
    RayBatch all;
    for (const auto& view : train.views) {
        view.camera.validate();
        for (int y = 0; y < view.camera.height; ++y) {
            for (int x = 0; x < view.camera.width; ++x) {
                const Vec3 dir = view.camera.ray_direction(x + 0.5, y + 0.5);
                double tn = train.near;
                double tf = train.far;
                if (!clip_ray_to_box(view.camera.position, dir, lo, hi, tn, tf)) continue;
                all.origins.push_back(view.camera.position);
                all.directions.push_back(dir);
                const double* px = view.image.at(x, y);
                all.gt_colors.push_back({px[0], px[1], px[2]});
                all.near.push_back(tn);
                all.far.push_back(tf);
            }
        }
    }
    require_arg(all.size() > 0, "fit_nerf: no training rays intersect the grid domain");

    Schedule schedule = options.schedule;
    if (schedule.stages.empty()) {
        schedule = Schedule::progressive(options.density_spec.resolution, 3, options.total_steps);
    }
    schedule.validate(3);

    GridSpec dspec = options.density_spec;
    dspec.resolution = schedule.stages.front().resolution;
    TaylorGrid density = init_grid(dspec);

    GridSpec sh_spec = options.density_spec;
    sh_spec.order = 0;
    sh_spec.resolution = options.sh_resolution;
    SHColorGrid sh = init_sh_grid(sh_spec, options.sh_degree);

    RenderOptions ropts;
    ropts.n_samples = options.n_samples;
    ropts.activation = options.activation;
    ropts.softplus_shift = options.softplus_shift;
    ropts.background = train.background;
    ropts.jitter = options.jitter;

    Rng rng(options.seed);
    RayBatch batch;
    const int bsize = static_cast<int>(std::min<std::size_t>(options.ray_batch, all.size()));
    batch.origins.resize(bsize);
    batch.directions.resize(bsize);
    batch.gt_colors.resize(bsize);
    batch.near.resize(bsize);
    batch.far.resize(bsize);

    NerfResult result;
    std::vector<double> grad_density;
    std::vector<double> grad_sh(sh.coeffs.size(), 0.0);
    AdamConfig density_adam = options.adam;
    density_adam.lr = options.lr_density;
    AdamConfig sh_adam = options.adam;
    sh_adam.lr = options.lr_sh;
    AdamState density_state;
    AdamState sh_state(sh.coeffs.size(), sh_adam);

    const auto t_start = std::chrono::steady_clock::now();
    int global_step = 0;
    for (std::size_t stage = 0; stage < schedule.stages.size(); ++stage) {
        const auto& st = schedule.stages[stage];
        bool resized = false;
        for (int a = 0; a < 3; ++a) {
            if (st.resolution[a] != density.spec.resolution[a]) resized = true;
        }
        if (resized) density = upsample(density, st.resolution);
        density_state = AdamState(density.coeffs.size(), density_adam);
        grad_density.assign(density.coeffs.size(), 0.0);

        for (int step = 0; step < st.steps; ++step) {
            const auto t0 = std::chrono::steady_clock::now();
            for (int i = 0; i < bsize; ++i) {
                const std::size_t r = rng.index(all.size());
                batch.origins[i] = all.origins[r];
                batch.directions[i] = all.directions[r];
                batch.gt_colors[i] = all.gt_colors[r];
                batch.near[i] = all.near[r];
                batch.far[i] = all.far[r];
            }
            std::fill(grad_density.begin(), grad_density.end(), 0.0);
            std::fill(grad_sh.begin(), grad_sh.end(), 0.0);
            ropts.jitter_seed = rng.bits();

            LossTerms terms;
            terms.fit = photometric_loss(density, sh, batch, ropts, grad_density, grad_sh,
                                         options.threads);
            if (options.lambda_tv_density > 0.0) {
                terms.tv = tv_loss(density, grad_density, options.lambda_tv_density,
                                   options.threads);
            }
            terms.total = terms.fit + options.lambda_tv_density * terms.tv;
            if (!std::isfinite(terms.total)) {
                throw NumericalError("fit_nerf: non-finite loss at stage " +
                                     std::to_string(stage) + " step " + std::to_string(step));
            }
            adam_step(density.coeffs, grad_density, density_state, options.threads);
            adam_step(sh.coeffs, grad_sh, sh_state, options.threads);
            const auto t1 = std::chrono::steady_clock::now();

            TraceRow row;
            row.step = global_step++;
            row.stage = static_cast<int>(stage);
            row.resolution = st.resolution;
            row.loss = terms;
            row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            result.trace.push_back(row);
        }
    }
    result.total_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    // Held-out PSNR with deterministic (unjittered) rendering.
    RenderOptions eval_opts = ropts;
    eval_opts.jitter = false;
    for (const auto& view : holdout.views) {
        const ImageRGB rendered = render_image(density, sh, view.camera, holdout.near, holdout.far,
                                               eval_opts, options.threads);
        result.per_view_psnr.push_back(psnr(rendered, view.image));
    }
    if (!result.per_view_psnr.empty()) {
        double sum = 0.0;
        for (double p : result.per_view_psnr) sum += p;
        result.holdout_psnr = sum / static_cast<double>(result.per_view_psnr.size());
    }

    result.report["train_rays"] = all.size();
    result.report["holdout_views"] = holdout.views.size();
    result.report["psnr"] = result.holdout_psnr;
    result.report["per_view_psnr"] = result.per_view_psnr;
    result.report["total_seconds"] = result.total_seconds;
    result.report["density_resolution"] = density.spec.resolution;
    result.report["density_order"] = density.spec.order;
    result.report["lr_density"] = options.lr_density;
    result.report["lr_sh"] = options.lr_sh;
    result.report["sh_degree"] = sh.degree;
    result.report["sh_resolution"] = sh.spec.resolution;
    result.density = std::move(density);
    result.sh = std::move(sh);
    return result;
}

}  // namespace tg

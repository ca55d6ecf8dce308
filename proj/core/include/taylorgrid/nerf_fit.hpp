#pragma once

#include <nlohmann/json.hpp>

#include "taylorgrid/scene.hpp"
#include "taylorgrid/schedule.hpp"
#include "taylorgrid/volume_render.hpp"

namespace tg {

struct NerfOptions {
    GridSpec density_spec;                 // target resolution and Taylor order
    Schedule schedule;                     // empty -> progressive default
    int total_steps = 6000;
    int sh_degree = 2;
    std::array<int, 3> sh_resolution{32, 32, 32};
    DensityActivation activation = DensityActivation::ShiftedSoftplus;
    double softplus_shift = -10.0;
    // per-group rates: raw densities travel tens of units through the shifted
    // softplus, so they train much faster than the sigmoid-squashed SH logits
    double lr_density = 0.1;
    double lr_sh = 0.01;
    AdamConfig adam;  // betas/eps shared by both groups
    int ray_batch = 1024;
    int n_samples = 48;
    double lambda_tv_density = 0.0;
    bool jitter = true;
    std::uint64_t seed = 1;
    int threads = 1;
};

struct NerfResult {
    TaylorGrid density;
    SHColorGrid sh;
    std::vector<TraceRow> trace;
    double holdout_psnr = 0.0;
    std::vector<double> per_view_psnr;
    double total_seconds = 0.0;
    nlohmann::json report;
};

/// Joint Adam optimization of density Taylor coefficients and SH color
/// coefficients on random ray minibatches; density resolution follows the
/// progressive schedule. Requires >= 2 training views.
NerfResult fit_nerf(const Scene& train, const Scene& holdout, const NerfOptions& options);

}  // namespace tg

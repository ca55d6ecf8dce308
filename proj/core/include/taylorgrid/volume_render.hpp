#pragma once

#include "taylorgrid/camera.hpp"
#include "taylorgrid/image.hpp"
#include "taylorgrid/sh.hpp"
#include "taylorgrid/taylor_grid.hpp"

namespace tg {

enum class DensityActivation { ShiftedSoftplus, ClampRelu };

/// sigma = activation(eval(grid, x)); non-negative by construction.
double density(const TaylorGrid& grid, const Vec3& x, DensityActivation activation,
               double softplus_shift = -10.0);

struct RenderOptions {
    int n_samples = 64;
    DensityActivation activation = DensityActivation::ShiftedSoftplus;
    double softplus_shift = -10.0;
    Vec3 background{1.0, 1.0, 1.0};
    bool jitter = false;          // stratified jitter inside the N bins
    std::uint64_t jitter_seed = 0;
};

struct RayRenderResult {
    Vec3 color{0.0, 0.0, 0.0};
    std::vector<double> weights;          // w_i = T_i (1 - exp(-sigma_i delta_i))
    double residual_transmittance = 1.0;  // background weight
};

/// Emission-absorption quadrature along origin + t * dir over [near, far]:
/// C = sum_i T_i (1 - exp(-sigma_i delta_i)) c_i + T_resid * background.
/// Without jitter, t_i = near + i * (far - near) / N, so constant-density
/// rays telescope to the closed-form integral exactly.
RayRenderResult render_ray(const TaylorGrid& density_grid, const SHColorGrid& sh_grid,
                           const Vec3& origin, const Vec3& dir, double near, double far,
                           const RenderOptions& opts, std::uint64_t ray_id = 0);

/// Mean squared RGB error over the batch with full analytic gradients to both
/// density coefficients (through the activation, weights and transmittance)
/// and SH coefficients (through the sigmoid, basis and interpolation).
/// Gradient buffers may be empty for value-only evaluation.
double photometric_loss(const TaylorGrid& density_grid, const SHColorGrid& sh_grid,
                        const RayBatch& batch, const RenderOptions& opts,
                        std::span<double> grad_density, std::span<double> grad_sh,
                        int threads = 1);

/// Per-pixel render; rays are clipped against the density grid's domain box
/// and [near, far]. Optionally returns accumulated opacity per pixel.
ImageRGB render_image(const TaylorGrid& density_grid, const SHColorGrid& sh_grid,
                      const Camera& camera, double near, double far, const RenderOptions& opts,
                      int threads = 1, ImageGray* alpha_out = nullptr);

}  // namespace tg

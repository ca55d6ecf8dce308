#pragma once

#include <optional>
#include <span>

#include "taylorgrid/rng.hpp"
#include "taylorgrid/sample_set.hpp"
#include "taylorgrid/schedule.hpp"
#include "taylorgrid/taylor_grid.hpp"

namespace tg {

enum class EikonalPointSource { ReuseBatch, FreshUniform };

struct LossConfig {
    double lambda1 = 1e-4;   // eikonal weight
    double lambda2 = 2e-5;   // total-variation weight
    double k = 50.0;         // adaptive-weight sharpness in normalized coords
    bool use_weighting = true;
    bool use_tv = true;
    int batch_size = 8192;
    EikonalPointSource eikonal_point_source = EikonalPointSource::ReuseBatch;
    // The adaptive weight is a stop-gradient factor by default; this flag
    // routes d w / d prediction into the gradient instead.
    bool differentiate_weight = false;

    void validate() const;
};

/// w(x) = max(w'(d_hat), w'(d)) with w'(d) = 1 - |2 sigmoid(k d) - 1|.
/// Near the surface the weight tends to 1, far from it to 0.
double adaptive_weight(double d_hat, double d, double k);

/// Mean weighted absolute SDF error over the batch. Adds the coefficient
/// gradient (scaled by `scale`) into `grad` when non-empty.
double recon_loss(const TaylorGrid& grid, std::span<const SdfSample> batch, const LossConfig& cfg,
                  std::span<double> grad, double scale = 1.0);

/// Mean (|grad f| - 1)^2 over the points; zero-gradient points contribute
/// value 1 with subgradient 0.
double eikonal_loss(const TaylorGrid& grid, std::span<const Vec3> points, std::span<double> grad,
                    double scale = 1.0);

/// Mean squared difference over all axis-adjacent vertex pairs and all
/// coefficient channels.
double tv_loss(const TaylorGrid& grid, std::span<double> grad, double scale = 1.0,
               int threads = 1);

/// L = recon + lambda1 * eik + lambda2 * tv, with the summed gradient.
/// `rng` drives fresh-uniform eikonal points when that source is selected.
LossTerms total_loss(const TaylorGrid& grid, std::span<const SdfSample> batch,
                     const LossConfig& cfg, std::span<double> grad, int threads = 1,
                     Rng* rng = nullptr);

}  // namespace tg

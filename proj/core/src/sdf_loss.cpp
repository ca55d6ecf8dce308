#include "taylorgrid/sdf_loss.hpp"

#include <cmath>
#include <utility>
#include <vector>

#include "taylorgrid/errors.hpp"
#include "taylorgrid/grad_accum.hpp"
#include "taylorgrid/parallel.hpp"

namespace tg {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

inline double w_prime(double d, double k) { return 1.0 - std::abs(2.0 * sigmoid(k * d) - 1.0); }

// d w'(d) / d d; subgradient 0 at the d = 0 kink.
inline double w_prime_deriv(double d, double k) {
    if (d == 0.0) return 0.0;
    const double s = sigmoid(k * d);
    const double ds = 2.0 * k * s * (1.0 - s);
    return d > 0.0 ? -ds : ds;
}

inline double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

struct PointTermSums {
    double recon = 0.0;
    double eik = 0.0;
};

// One fused pass over the batch: weighted |d_hat - d| plus, optionally, the
// eikonal residual at the same points. Writing the same loop for the
// standalone ops and the fused total keeps the accumulation order identical.
template <bool kWantEik>
PointTermSums point_terms_chunk(const TaylorGrid& grid, std::span<const SdfSample> batch,
                                const LossConfig& cfg, double recon_scale, double eik_scale,
                                double inv_n, std::span<double> grad, GradScratch* scratch) {
    PointTermSums sums;
    const int K = grid.spec.coeffs_per_vertex();
    const bool want_grad = !grad.empty();
    for (const auto& s : batch) {
        EvalResult er;
        if constexpr (kWantEik) {
            er = eval_with_spatial_gradient(grid, s.point);
        } else {
            er.value = eval(grid, s.point);
        }
        const double resid = er.value - s.gt_sdf;
        const double w = cfg.use_weighting ? adaptive_weight(er.value, s.gt_sdf, cfg.k) : 1.0;
        sums.recon += w * std::abs(resid);

        double upstream = 0.0;
        Vec3 upstream_vec{0.0, 0.0, 0.0};
        if (want_grad) {
            upstream = recon_scale * inv_n * w * sign_of(resid);
            if (cfg.use_weighting && cfg.differentiate_weight) {
                const double wp_pred = w_prime(er.value, cfg.k);
                const double wp_gt = w_prime(s.gt_sdf, cfg.k);
                if (wp_pred > wp_gt) {
                    upstream += recon_scale * inv_n * std::abs(resid) * w_prime_deriv(er.value, cfg.k);
                }
            }
        }
        if constexpr (kWantEik) {
            const double n = norm(er.spatial_gradient);
            const double r = n - 1.0;
            sums.eik += r * r;
            if (want_grad && n > 0.0) {
                upstream_vec = (eik_scale * inv_n * 2.0 * r / n) * er.spatial_gradient;
            }
        }
        if (want_grad) {
            const CellRef ref = backprop_value_and_spatial(grid, s.point, upstream, upstream_vec, grad);
            if (scratch) {
                for (int c = 0; c < ref.corner_count; ++c) {
                    scratch->note(static_cast<std::size_t>(ref.vertex_ids[c]) * K, K);
                }
            }
        }
    }
    return sums;
}

template <bool kWantEik>
PointTermSums point_terms(const TaylorGrid& grid, std::span<const SdfSample> batch,
                          const LossConfig& cfg, double recon_scale, double eik_scale,
                          std::span<double> grad, int threads) {
    const double inv_n = 1.0 / static_cast<double>(batch.size());
    if (threads <= 1 || batch.size() < 64 || grad.empty()) {
        return point_terms_chunk<kWantEik>(grid, batch, cfg, recon_scale, eik_scale, inv_n, grad,
                                           nullptr);
    }
    static thread_local std::vector<GradScratch> scratch_pool;
    auto& pool = scratch_pool;  // workers must share the caller's instance
    const int nchunks = threads;
    if (pool.size() < static_cast<std::size_t>(nchunks)) pool.resize(nchunks);
    std::vector<PointTermSums> partial(nchunks);
    parallel_for(static_cast<std::int64_t>(batch.size()), threads,
                 [&](std::int64_t begin, std::int64_t end, int t) {
                     pool[t].ensure(grad.size());
                     partial[t] = point_terms_chunk<kWantEik>(
                         grid, batch.subspan(begin, end - begin), cfg, recon_scale, eik_scale,
                         inv_n, pool[t].span(), &pool[t]);
                 });
    PointTermSums sums;
    for (int t = 0; t < nchunks; ++t) {
        sums.recon += partial[t].recon;
        sums.eik += partial[t].eik;
        pool[t].merge_into(grad);
    }
    return sums;
}

}  // namespace

void LossConfig::validate() const {
    require_arg(lambda1 >= 0.0 && lambda2 >= 0.0, "LossConfig: lambda weights must be >= 0");
    require_arg(k > 0.0, "LossConfig: weight sharpness k must be > 0");
    require_arg(batch_size > 0, "LossConfig: batch_size must be > 0");
}

double adaptive_weight(double d_hat, double d, double k) {
    require_arg(k > 0.0, "adaptive_weight: k must be > 0");
    return std::max(w_prime(d_hat, k), w_prime(d, k));
}

double recon_loss(const TaylorGrid& grid, std::span<const SdfSample> batch, const LossConfig& cfg,
                  std::span<double> grad, double scale) {
    require_arg(!batch.empty(), "recon_loss: empty batch");
    const PointTermSums sums = point_terms<false>(grid, batch, cfg, scale, 0.0, grad, 1);
    return sums.recon / static_cast<double>(batch.size());
}

double eikonal_loss(const TaylorGrid& grid, std::span<const Vec3> points, std::span<double> grad,
                    double scale) {
    require_arg(!points.empty(), "eikonal_loss: empty point set");
    const double inv_n = 1.0 / static_cast<double>(points.size());
    double sum = 0.0;
    for (const Vec3& p : points) {
        const EvalResult er = eval_with_spatial_gradient(grid, p);
        const double n = norm(er.spatial_gradient);
        const double r = n - 1.0;
        sum += r * r;
        if (!grad.empty() && n > 0.0) {
            const Vec3 upstream = (scale * inv_n * 2.0 * r / n) * er.spatial_gradient;
            backprop_spatial_chain(grid, p, upstream, grad);
        }
    }
    return sum * inv_n;
}

double tv_loss(const TaylorGrid& grid, std::span<double> grad, double scale, int threads) {
    const GridSpec& spec = grid.spec;
    spec.validate();
    const int K = spec.coeffs_per_vertex();
    const int dim = spec.dim;

    std::int64_t pair_count = 0;
    for (int a = 0; a < dim; ++a) {
        std::int64_t n = spec.resolution[a] - 1;
        for (int b = 0; b < dim; ++b) {
            if (b != a) n *= spec.resolution[b];
        }
        pair_count += n;
    }
    const double inv_norm = 1.0 / (static_cast<double>(pair_count) * K);
    const double gscale = 2.0 * scale * inv_norm;

    const int rx = spec.resolution[0];
    const int ry = spec.resolution[1];
    const int rz = dim == 3 ? spec.resolution[2] : 1;
    const std::int64_t stride[3] = {1, rx, static_cast<std::int64_t>(rx) * ry};
    const double* c = grid.coeffs.data();
    double* g = grad.empty() ? nullptr : grad.data();

    // Pairs along x/y live inside one z-slice, so slices process in parallel;
    // z-pairs touch two adjacent slices and run in an even/odd two-phase pass.
    std::vector<double> slice_sum(static_cast<std::size_t>(rz), 0.0);
    auto do_slice_xy = [&](int z) {
        double sum = 0.0;
        const std::int64_t zbase = z * stride[2];
        for (int y = 0; y < ry; ++y) {
            const std::int64_t ybase = zbase + y * stride[1];
            for (int x = 0; x < rx; ++x) {
                const std::int64_t v = ybase + x;
                const double* cv = c + v * K;
                if (x + 1 < rx) {
                    const double* cu = cv + K;
                    double* gv = g ? g + v * K : nullptr;
                    for (int ch = 0; ch < K; ++ch) {
                        const double d = cu[ch] - cv[ch];
                        sum += d * d;
                        if (gv) {
                            gv[ch] -= gscale * d;
                            gv[K + ch] += gscale * d;
                        }
                    }
                }
                if (y + 1 < ry) {
                    const double* cu = cv + stride[1] * K;
                    double* gv = g ? g + v * K : nullptr;
                    for (int ch = 0; ch < K; ++ch) {
                        const double d = cu[ch] - cv[ch];
                        sum += d * d;
                        if (gv) {
                            gv[ch] -= gscale * d;
                            gv[stride[1] * K + ch] += gscale * d;
                        }
                    }
                }
            }
        }
        return sum;
    };
    parallel_for(rz, threads, [&](std::int64_t begin, std::int64_t end, int) {
        for (std::int64_t z = begin; z < end; ++z) slice_sum[z] = do_slice_xy(static_cast<int>(z));
    });
    double total = 0.0;
    for (double s : slice_sum) total += s;

    if (dim == 3 && rz > 1) {
        std::vector<double> zsum(static_cast<std::size_t>(rz - 1), 0.0);
        auto do_zpairs = [&](int z) {
            double sum = 0.0;
            const std::int64_t zbase = z * stride[2];
            for (std::int64_t i = 0; i < stride[2]; ++i) {
                const std::int64_t v = zbase + i;
                const double* cv = c + v * K;
                const double* cu = cv + stride[2] * K;
                double* gv = g ? g + v * K : nullptr;
                for (int ch = 0; ch < K; ++ch) {
                    const double d = cu[ch] - cv[ch];
                    sum += d * d;
                    if (gv) {
                        gv[ch] -= gscale * d;
                        gv[stride[2] * K + ch] += gscale * d;
                    }
                }
            }
            return sum;
        };
        for (int phase = 0; phase < 2; ++phase) {
            const int count = (rz - 1 - phase + 1) / 2;
            parallel_for(count, threads, [&](std::int64_t begin, std::int64_t end, int) {
                for (std::int64_t idx = begin; idx < end; ++idx) {
                    const int z = phase + 2 * static_cast<int>(idx);
                    zsum[z] = do_zpairs(z);
                }
            });
        }
        for (double s : zsum) total += s;
    }
    return total * inv_norm;
}

LossTerms total_loss(const TaylorGrid& grid, std::span<const SdfSample> batch,
                     const LossConfig& cfg, std::span<double> grad, int threads, Rng* rng) {
    cfg.validate();
    require_arg(!batch.empty(), "total_loss: empty batch");

    LossTerms terms;
    const bool want_eik = cfg.lambda1 > 0.0;
    const bool reuse_batch = cfg.eikonal_point_source == EikonalPointSource::ReuseBatch;

    if (want_eik && reuse_batch) {
        const PointTermSums sums =
            point_terms<true>(grid, batch, cfg, 1.0, cfg.lambda1, grad, threads);
        terms.fit = sums.recon / static_cast<double>(batch.size());
        terms.eik = sums.eik / static_cast<double>(batch.size());
    } else {
        const PointTermSums sums = point_terms<false>(grid, batch, cfg, 1.0, 0.0, grad, threads);
        terms.fit = sums.recon / static_cast<double>(batch.size());
        if (want_eik) {
            require_arg(rng != nullptr, "total_loss: fresh-uniform eikonal points need an rng");
            std::vector<Vec3> points(batch.size());
            const Vec3 lo = grid.spec.origin;
            const Vec3 hi = grid.spec.domain_max();
            for (auto& p : points) p = rng->uniform_in_box(lo, hi, grid.spec.dim);
            terms.eik = eikonal_loss(grid, points, grad, cfg.lambda1);
        }
    }
    if (cfg.use_tv && cfg.lambda2 > 0.0) {
        terms.tv = tv_loss(grid, grad, cfg.lambda2, threads);
    } else if (cfg.use_tv) {
        terms.tv = tv_loss(grid, {}, 1.0, threads);  // reported, not optimized
    }
    terms.total = terms.fit + cfg.lambda1 * terms.eik + cfg.lambda2 * terms.tv;
    return terms;
}

}  // namespace tg

#include "taylorgrid/volume_render.hpp"

#include <cmath>
#include <vector>

#include "taylorgrid/errors.hpp"
#include "taylorgrid/grad_accum.hpp"
#include "taylorgrid/parallel.hpp"
#include "taylorgrid/rng.hpp"

namespace tg {

namespace {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// log(1 + exp(x)) without overflow
inline double softplus(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }

inline double apply_activation(double raw, DensityActivation act, double shift, double* deriv) {
    if (act == DensityActivation::ShiftedSoftplus) {
        const double z = raw + shift;
        if (deriv) *deriv = sigmoid(z);
        return softplus(z);
    }
    if (deriv) *deriv = raw > 0.0 ? 1.0 : 0.0;
    return raw > 0.0 ? raw : 0.0;
}

constexpr int kMaxSamples = 1024;

// Per-sample state kept between the forward and backward passes of one ray.
struct RayWorkspace {
    std::vector<double> t, delta, sigma, act_deriv, trans_step, weight;
    std::vector<Vec3> point, color, pre;
    std::vector<std::array<std::int64_t, 8>> sh_vid;
    std::vector<std::array<double, 8>> sh_w;

    void ensure(int n) {
        if (static_cast<int>(t.size()) >= n) return;
        t.resize(n);
        delta.resize(n);
        sigma.resize(n);
        act_deriv.resize(n);
        trans_step.resize(n);
        weight.resize(n);
        point.resize(n);
        color.resize(n);
        pre.resize(n);
        sh_vid.resize(n);
        sh_w.resize(n);
    }
};

struct ForwardOut {
    Vec3 color{0.0, 0.0, 0.0};
    double residual = 1.0;
    int used_samples = 0;
};

ForwardOut forward_ray(const TaylorGrid& dgrid, const SHColorGrid& shgrid, const Vec3& origin,
                       const Vec3& dir, double near, double far, const RenderOptions& opts,
                       std::uint64_t ray_id, RayWorkspace& ws, bool want_backward) {
    const int n = opts.n_samples;
    ws.ensure(n);
    const double span = far - near;
    const double bin = span / n;

    if (opts.jitter) {
        Rng rng(opts.jitter_seed ^ (ray_id * 0x9e3779b97f4a7c15ull + 0x2545f4914f6cdd1dull));
        for (int i = 0; i < n; ++i) ws.t[i] = near + (i + rng.uniform()) * bin;
    } else {
        for (int i = 0; i < n; ++i) ws.t[i] = near + i * bin;
    }
    for (int i = 0; i + 1 < n; ++i) ws.delta[i] = ws.t[i + 1] - ws.t[i];
    ws.delta[n - 1] = far - ws.t[n - 1];

    const int B = shgrid.basis_count();
    const int C = shgrid.channels();
    double basis[kMaxShBasis];
    sh_basis(shgrid.degree, dir, {basis, static_cast<std::size_t>(B)});

    ForwardOut out;
    out.used_samples = n;
    double transmittance = 1.0;
    for (int i = 0; i < n; ++i) {
        const Vec3 x = origin + ws.t[i] * dir;
        ws.point[i] = x;
        const double raw = eval(dgrid, x);
        ws.sigma[i] = apply_activation(raw, opts.activation, opts.softplus_shift,
                                       want_backward ? &ws.act_deriv[i] : nullptr);

        // SH color at x for the fixed ray direction
        const CellRef ref = locate(shgrid.spec, x);
        Vec3 pre{0.0, 0.0, 0.0};
        for (int c = 0; c < ref.corner_count; ++c) {
            double w = 1.0;
            for (int a = 0; a < shgrid.spec.dim; ++a) {
                const int bit = (c >> a) & 1;
                w *= bit ? ref.local[a] : 1.0 - ref.local[a];
            }
            ws.sh_w[i][c] = w;
            ws.sh_vid[i][c] = ref.vertex_ids[c];
            const double* block = shgrid.coeffs.data() + ref.vertex_ids[c] * C;
            for (int ch = 0; ch < 3; ++ch) {
                double acc = 0.0;
                const double* k = block + ch * B;
                for (int b = 0; b < B; ++b) acc += k[b] * basis[b];
                pre[ch] += w * acc;
            }
        }
        ws.pre[i] = pre;
        ws.color[i] = {sigmoid(pre[0]), sigmoid(pre[1]), sigmoid(pre[2])};

        const double step = std::exp(-ws.sigma[i] * ws.delta[i]);
        ws.trans_step[i] = step;
        const double w = transmittance * (1.0 - step);
        ws.weight[i] = w;
        out.color += w * ws.color[i];
        transmittance *= step;
    }
    out.residual = transmittance;
    out.color += transmittance * opts.background;
    return out;
}

// dL/dsigma_i = delta_i * (T_{i+1} c_i - suffix_i) . dl_dcolor with
// suffix_i = sum_{j>i} w_j c_j + T_resid * background.
void backward_ray(const TaylorGrid& dgrid, const SHColorGrid& shgrid, const Vec3& dir,
                  const RenderOptions& opts, const ForwardOut& fwd, const Vec3& dl_dcolor,
                  RayWorkspace& ws, std::span<double> grad_density, std::span<double> grad_sh,
                  GradScratch* note_density, GradScratch* note_sh) {
    const int n = fwd.used_samples;
    const int B = shgrid.basis_count();
    const int C = shgrid.channels();
    const int Kd = dgrid.spec.coeffs_per_vertex();
    double basis[kMaxShBasis];
    sh_basis(shgrid.degree, dir, {basis, static_cast<std::size_t>(B)});

    Vec3 suffix = fwd.residual * opts.background;
    // reconstruct T_{i+1} backwards: T_{n} ... via division is unstable when
    // trans_step underflows; accumulate forward instead.
    // T_{i+1} = prod_{j<=i} trans_step[j]; store in ws.t (no longer needed).
    double run = 1.0;
    for (int i = 0; i < n; ++i) {
        run *= ws.trans_step[i];
        ws.t[i] = run;  // T_{i+1}
    }
    for (int i = n - 1; i >= 0; --i) {
        const double t_next = ws.t[i];
        // density chain
        if (!grad_density.empty()) {
            double dl_dsigma = 0.0;
            for (int ch = 0; ch < 3; ++ch) {
                dl_dsigma += dl_dcolor[ch] * ws.delta[i] * (t_next * ws.color[i][ch] - suffix[ch]);
            }
            const double dl_draw = dl_dsigma * ws.act_deriv[i];
            if (dl_draw != 0.0) {
                const CellRef ref = backprop_point(dgrid, ws.point[i], dl_draw, grad_density);
                if (note_density) {
                    for (int c = 0; c < ref.corner_count; ++c) {
                        note_density->note(static_cast<std::size_t>(ref.vertex_ids[c]) * Kd, Kd);
                    }
                }
            }
        }
        // color chain
        if (!grad_sh.empty()) {
            for (int ch = 0; ch < 3; ++ch) {
                const double c = ws.color[i][ch];
                const double dl_dpre = dl_dcolor[ch] * ws.weight[i] * c * (1.0 - c);
                if (dl_dpre == 0.0) continue;
                for (int corner = 0; corner < (1 << shgrid.spec.dim); ++corner) {
                    const double f = ws.sh_w[i][corner] * dl_dpre;
                    double* k = grad_sh.data() + ws.sh_vid[i][corner] * C + ch * B;
                    for (int b = 0; b < B; ++b) k[b] += f * basis[b];
                }
            }
            if (note_sh) {
                for (int corner = 0; corner < (1 << shgrid.spec.dim); ++corner) {
                    note_sh->note(static_cast<std::size_t>(ws.sh_vid[i][corner]) * C, C);
                }
            }
        }
        suffix += ws.weight[i] * ws.color[i];
    }
}

}  // namespace

double density(const TaylorGrid& grid, const Vec3& x, DensityActivation activation,
               double softplus_shift) {
    return apply_activation(eval(grid, x), activation, softplus_shift, nullptr);
}

RayRenderResult render_ray(const TaylorGrid& density_grid, const SHColorGrid& sh_grid,
                           const Vec3& origin, const Vec3& dir, double near, double far,
                           const RenderOptions& opts, std::uint64_t ray_id) {
    require_arg(opts.n_samples >= 1 && opts.n_samples <= kMaxSamples,
                "render_ray: n_samples out of range");
    require_arg(near < far, "render_ray: near must be < far");
    RayWorkspace ws;
    const ForwardOut fwd =
        forward_ray(density_grid, sh_grid, origin, dir, near, far, opts, ray_id, ws, false);
    RayRenderResult result;
    result.color = fwd.color;
    result.residual_transmittance = fwd.residual;
    result.weights.assign(ws.weight.begin(), ws.weight.begin() + fwd.used_samples);
    return result;
}

double photometric_loss(const TaylorGrid& density_grid, const SHColorGrid& sh_grid,
                        const RayBatch& batch, const RenderOptions& opts,
                        std::span<double> grad_density, std::span<double> grad_sh, int threads) {
    require_arg(batch.size() > 0, "photometric_loss: empty ray batch");
    require_arg(batch.gt_colors.size() == batch.size(), "photometric_loss: missing gt colors");
    require_arg(opts.n_samples >= 1 && opts.n_samples <= kMaxSamples,
                "photometric_loss: n_samples out of range");
    require_arg(grad_density.empty() || grad_density.size() == density_grid.coeffs.size(),
                "photometric_loss: density gradient buffer mismatch");
    require_arg(grad_sh.empty() || grad_sh.size() == sh_grid.coeffs.size(),
                "photometric_loss: sh gradient buffer mismatch");

    const double inv_n = 1.0 / static_cast<double>(batch.size());
    const bool want_grad = !grad_density.empty() || !grad_sh.empty();

    auto run_chunk = [&](std::int64_t begin, std::int64_t end, std::span<double> gd,
                         std::span<double> gs, GradScratch* nd, GradScratch* ns) {
        RayWorkspace ws;
        double sum = 0.0;
        for (std::int64_t r = begin; r < end; ++r) {
            const ForwardOut fwd =
                forward_ray(density_grid, sh_grid, batch.origins[r], batch.directions[r],
                            batch.near[r], batch.far[r], opts, static_cast<std::uint64_t>(r), ws,
                            want_grad);
            const Vec3 err = fwd.color - batch.gt_colors[r];
            sum += norm2(err);
            if (want_grad) {
                const Vec3 dl_dcolor = (2.0 * inv_n) * err;
                backward_ray(density_grid, sh_grid, batch.directions[r], opts, fwd, dl_dcolor, ws,
                             gd, gs, nd, ns);
            }
        }
        return sum;
    };

    if (threads <= 1 || batch.size() < 8 || !want_grad) {
        return run_chunk(0, static_cast<std::int64_t>(batch.size()), grad_density, grad_sh,
                         nullptr, nullptr) *
               inv_n;
    }

    static thread_local std::vector<GradScratch> density_pool;
    static thread_local std::vector<GradScratch> sh_pool;
    auto& dpool = density_pool;  // workers must share the caller's instance
    auto& spool = sh_pool;
    if (dpool.size() < static_cast<std::size_t>(threads)) dpool.resize(threads);
    if (spool.size() < static_cast<std::size_t>(threads)) spool.resize(threads);
    std::vector<double> partial(threads, 0.0);
    parallel_for(static_cast<std::int64_t>(batch.size()), threads,
                 [&](std::int64_t begin, std::int64_t end, int t) {
                     dpool[t].ensure(grad_density.size());
                     spool[t].ensure(grad_sh.size());
                     partial[t] = run_chunk(begin, end,
                                            grad_density.empty() ? std::span<double>{}
                                                                 : dpool[t].span(),
                                            grad_sh.empty() ? std::span<double>{} : spool[t].span(),
                                            grad_density.empty() ? nullptr : &dpool[t],
                                            grad_sh.empty() ? nullptr : &spool[t]);
                 });
    double sum = 0.0;
    for (int t = 0; t < threads; ++t) {
        sum += partial[t];
        dpool[t].merge_into(grad_density);
        spool[t].merge_into(grad_sh);
    }
    return sum * inv_n;
}

ImageRGB render_image(const TaylorGrid& density_grid, const SHColorGrid& sh_grid,
                      const Camera& camera, double near, double far, const RenderOptions& opts,
                      int threads, ImageGray* alpha_out) {
    camera.validate();
    ImageRGB img;
    img.width = camera.width;
    img.height = camera.height;
    img.pixels.assign(static_cast<std::size_t>(3) * camera.width * camera.height, 0.0);
    if (alpha_out) {
        alpha_out->width = camera.width;
        alpha_out->height = camera.height;
        alpha_out->pixels.assign(static_cast<std::size_t>(camera.width) * camera.height, 0.0);
    }
    const Vec3 lo = density_grid.spec.origin;
    const Vec3 hi = density_grid.spec.domain_max();

    parallel_for(camera.height, threads, [&](std::int64_t rbegin, std::int64_t rend, int) {
        RayWorkspace ws;
        for (std::int64_t y = rbegin; y < rend; ++y) {
            for (int x = 0; x < camera.width; ++x) {
                const Vec3 dir = camera.ray_direction(x + 0.5, y + 0.5);
                double tn = near;
                double tf = far;
                Vec3 color = opts.background;
                double alpha = 0.0;
                if (clip_ray_to_box(camera.position, dir, lo, hi, tn, tf)) {
                    const std::uint64_t ray_id = static_cast<std::uint64_t>(y) * camera.width + x;
                    const ForwardOut fwd = forward_ray(density_grid, sh_grid, camera.position, dir,
                                                       tn, tf, opts, ray_id, ws, false);
                    color = fwd.color;
                    alpha = 1.0 - fwd.residual;
                }
                double* px = img.at(x, static_cast<int>(y));
                px[0] = color[0];
                px[1] = color[1];
                px[2] = color[2];
                if (alpha_out) alpha_out->at(x, static_cast<int>(y)) = alpha;
            }
        }
    });
    return img;
}

}  // namespace tg

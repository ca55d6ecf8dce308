#include "taylorgrid/taylor_grid.hpp"

#include <cmath>
#include <string>

#include "taylorgrid/errors.hpp"
#include "taylorgrid/rng.hpp"

namespace tg {

namespace {

// Upper-triangle (row-major) index pairs of the Hessian block.
constexpr int kPairs2[3][2] = {{0, 0}, {0, 1}, {1, 1}};
constexpr int kPairs3[6][2] = {{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}};

inline const int (*pairs_for(int dim))[2] { return dim == 2 ? kPairs2 : kPairs3; }

// Per-corner interpolation geometry for one query point.
struct Corners {
    int count = 0;
    int dim = 0;
    double w[8];
    Vec3 dw[8];     // d w / d x, world units
    Vec3 delta[8];  // x - corner position, world units
    std::int64_t vid[8];
};

Corners make_corners(const GridSpec& spec, const CellRef& ref) {
    Corners c;
    c.count = ref.corner_count;
    c.dim = spec.dim;
    double h[3] = {1.0, 1.0, 1.0};
    double inv_h[3] = {0.0, 0.0, 0.0};
    for (int a = 0; a < spec.dim; ++a) {
        h[a] = spec.spacing(a);
        inv_h[a] = 1.0 / h[a];
    }
    for (int i = 0; i < c.count; ++i) {
        double s[3];
        int bit[3] = {0, 0, 0};
        for (int a = 0; a < spec.dim; ++a) {
            bit[a] = (i >> a) & 1;
            s[a] = bit[a] ? ref.local[a] : 1.0 - ref.local[a];
        }
        double w = 1.0;
        for (int a = 0; a < spec.dim; ++a) w *= s[a];
        c.w[i] = w;
        Vec3 dw{0.0, 0.0, 0.0};
        for (int a = 0; a < spec.dim; ++a) {
            double other = 1.0;
            for (int b = 0; b < spec.dim; ++b) {
                if (b != a) other *= s[b];
            }
            dw[a] = (bit[a] ? 1.0 : -1.0) * inv_h[a] * other;
        }
        c.dw[i] = dw;
        Vec3 d{0.0, 0.0, 0.0};
        for (int a = 0; a < spec.dim; ++a) d[a] = (ref.local[a] - bit[a]) * h[a];
        c.delta[i] = d;
        c.vid[i] = ref.vertex_ids[i];
    }
    return c;
}

// Taylor polynomial of one coefficient block at offset d, optionally with its
// derivative w.r.t. d.
inline double taylor_poly(const double* b, int order, int dim, const Vec3& d, Vec3* grad) {
    double v = b[0];
    if (grad) *grad = {0.0, 0.0, 0.0};
    if (order >= 1) {
        for (int a = 0; a < dim; ++a) {
            v += b[1 + a] * d[a];
            if (grad) (*grad)[a] += b[1 + a];
        }
    }
    if (order >= 2) {
        const auto* pairs = pairs_for(dim);
        const int npairs = dim * (dim + 1) / 2;
        const double* q = b + 1 + dim;
        for (int t = 0; t < npairs; ++t) {
            const int j = pairs[t][0];
            const int k = pairs[t][1];
            const double c = q[t];
            if (j == k) {
                v += 0.5 * c * d[j] * d[j];
                if (grad) (*grad)[j] += c * d[j];
            } else {
                v += c * d[j] * d[k];
                if (grad) {
                    (*grad)[j] += c * d[k];
                    (*grad)[k] += c * d[j];
                }
            }
        }
    }
    return v;
}

EvalResult eval_impl(const TaylorGrid& grid, const Vec3& point, bool want_grad) {
    const CellRef ref = locate(grid.spec, point);
    const Corners c = make_corners(grid.spec, ref);
    const int K = grid.spec.coeffs_per_vertex();
    const int order = grid.spec.order;

    EvalResult out;
    for (int i = 0; i < c.count; ++i) {
        const double* b = grid.coeffs.data() + c.vid[i] * K;
        Vec3 tgrad;
        const double tv = taylor_poly(b, order, c.dim, c.delta[i], want_grad ? &tgrad : nullptr);
        out.value += c.w[i] * tv;
        if (want_grad) {
            for (int a = 0; a < c.dim; ++a) {
                out.spatial_gradient[a] += c.dw[i][a] * tv + c.w[i] * tgrad[a];
            }
        }
    }
    return out;
}

// alpha = upstream * w_i + upstream_vec . dw_i; beta = w_i. Coefficient ch
// receives alpha * phi_ch(delta) + beta * upstream_vec . dphi_ch(delta).
void accumulate_cell(const TaylorGrid& grid, const Corners& c, double upstream,
                     const Vec3& gvec, std::span<double> grad) {
    const int K = grid.spec.coeffs_per_vertex();
    const int order = grid.spec.order;
    const int dim = c.dim;
    for (int i = 0; i < c.count; ++i) {
        double* g = grad.data() + c.vid[i] * K;
        const Vec3& d = c.delta[i];
        const double alpha = upstream * c.w[i] + dot(gvec, c.dw[i]);
        const double beta = c.w[i];
        g[0] += alpha;
        if (order >= 1) {
            for (int a = 0; a < dim; ++a) g[1 + a] += alpha * d[a] + beta * gvec[a];
        }
        if (order >= 2) {
            const auto* pairs = pairs_for(dim);
            const int npairs = dim * (dim + 1) / 2;
            double* q = g + 1 + dim;
            for (int t = 0; t < npairs; ++t) {
                const int j = pairs[t][0];
                const int k = pairs[t][1];
                if (j == k) {
                    q[t] += alpha * 0.5 * d[j] * d[j] + beta * gvec[j] * d[j];
                } else {
                    q[t] += alpha * d[j] * d[k] + beta * (gvec[j] * d[k] + gvec[k] * d[j]);
                }
            }
        }
    }
}

void check_grad_shape(const TaylorGrid& grid, std::span<double> grad) {
    require_arg(grad.size() == grid.coeffs.size(),
                "gradient buffer has " + std::to_string(grad.size()) + " entries, expected " +
                    std::to_string(grid.coeffs.size()));
}

}  // namespace

TaylorGrid init_grid(const GridSpec& spec, const InitOptions& opts) {
    spec.validate();
    const std::int64_t total = spec.coeff_total();
    const std::uint64_t bytes = static_cast<std::uint64_t>(total) * sizeof(double);
    if (bytes > opts.memory_cap_bytes) {
        throw ResourceError("init_grid: " + std::to_string(bytes) +
                            " bytes exceeds memory cap of " +
                            std::to_string(opts.memory_cap_bytes));
    }
    TaylorGrid grid;
    grid.spec = spec;
    grid.coeffs.assign(static_cast<std::size_t>(total), 0.0);
    const int K = spec.coeffs_per_vertex();
    switch (opts.mode) {
        case InitMode::Zeros:
            break;
        case InitMode::Constant:
            for (std::int64_t v = 0; v < spec.vertex_count(); ++v) grid.coeffs[v * K] = opts.constant;
            break;
        case InitMode::SmallUniform: {
            Rng rng(opts.seed);
            for (auto& x : grid.coeffs) x = rng.uniform(-opts.epsilon, opts.epsilon);
            break;
        }
    }
    return grid;
}

bool all_finite(const TaylorGrid& grid) {
    for (double x : grid.coeffs) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

double eval(const TaylorGrid& grid, const Vec3& point) {
    return eval_impl(grid, point, false).value;
}

EvalResult eval_with_spatial_gradient(const TaylorGrid& grid, const Vec3& point) {
    return eval_impl(grid, point, true);
}

CellRef backprop_point(const TaylorGrid& grid, const Vec3& point, double upstream,
                       std::span<double> grad) {
    check_grad_shape(grid, grad);
    const CellRef ref = locate(grid.spec, point);
    if (upstream != 0.0) {
        accumulate_cell(grid, make_corners(grid.spec, ref), upstream, Vec3{0.0, 0.0, 0.0}, grad);
    }
    return ref;
}

CellRef backprop_spatial_chain(const TaylorGrid& grid, const Vec3& point, const Vec3& upstream_vec,
                               std::span<double> grad) {
    check_grad_shape(grid, grad);
    const CellRef ref = locate(grid.spec, point);
    accumulate_cell(grid, make_corners(grid.spec, ref), 0.0, upstream_vec, grad);
    return ref;
}

CellRef backprop_value_and_spatial(const TaylorGrid& grid, const Vec3& point, double upstream,
                                   const Vec3& upstream_vec, std::span<double> grad) {
    check_grad_shape(grid, grad);
    const CellRef ref = locate(grid.spec, point);
    accumulate_cell(grid, make_corners(grid.spec, ref), upstream, upstream_vec, grad);
    return ref;
}

std::vector<double> multilinear_resample(const GridSpec& old_geom, std::span<const double> data,
                                         int channels, const std::array<int, 3>& new_resolution) {
    GridSpec ng = old_geom;
    ng.resolution = new_resolution;
    ng.validate();
    require_arg(data.size() ==
                    static_cast<std::size_t>(old_geom.vertex_count()) * channels,
                "multilinear_resample: data size mismatch");

    std::vector<double> out(static_cast<std::size_t>(ng.vertex_count()) * channels, 0.0);
    std::array<int, 3> v{0, 0, 0};
    const int dim = ng.dim;
    std::int64_t idx = 0;
    // Iterate new vertices in flat order (x fastest).
    const std::int64_t n = ng.vertex_count();
    while (idx < n) {
        const Vec3 p = ng.vertex_position(v);
        const CellRef ref = locate(old_geom, p);
        double w[8];
        for (int i = 0; i < ref.corner_count; ++i) {
            double wi = 1.0;
            for (int a = 0; a < dim; ++a) {
                const int bit = (i >> a) & 1;
                wi *= bit ? ref.local[a] : 1.0 - ref.local[a];
            }
            w[i] = wi;
        }
        double* dst = out.data() + idx * channels;
        for (int i = 0; i < ref.corner_count; ++i) {
            const double* src = data.data() + ref.vertex_ids[i] * channels;
            const double wi = w[i];
            for (int ch = 0; ch < channels; ++ch) dst[ch] += wi * src[ch];
        }
        ++idx;
        for (int a = 0; a < dim; ++a) {
            if (++v[a] < ng.resolution[a]) break;
            v[a] = 0;
        }
    }
    return out;
}

TaylorGrid upsample(const TaylorGrid& grid, const std::array<int, 3>& new_resolution) {
    for (int a = 0; a < grid.spec.dim; ++a) {
        require_arg(new_resolution[a] >= grid.spec.resolution[a],
                    "upsample: resolution may not shrink (axis " + std::to_string(a) + ")");
    }
    TaylorGrid out;
    out.spec = grid.spec;
    out.spec.resolution = new_resolution;
    out.coeffs = multilinear_resample(grid.spec, grid.coeffs, grid.spec.coeffs_per_vertex(),
                                      new_resolution);
    return out;
}

}  // namespace tg

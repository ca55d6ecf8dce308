#include "taylorgrid/sampling.hpp"

#include <algorithm>
#include <cmath>

#include "taylorgrid/errors.hpp"
#include "taylorgrid/rng.hpp"

namespace tg {

std::array<std::int64_t, 3> ratio_counts(std::int64_t total, const std::array<int, 3>& ratio) {
    require_arg(total > 0, "ratio_counts: total must be > 0");
    std::int64_t denom = 0;
    for (int r : ratio) {
        require_arg(r >= 0, "ratio_counts: negative ratio");
        denom += r;
    }
    require_arg(denom > 0, "ratio_counts: all-zero ratio");
    std::array<std::int64_t, 3> counts{};
    std::int64_t assigned = 0;
    for (int i = 0; i < 3; ++i) {
        counts[i] = total * ratio[i] / denom;
        assigned += counts[i];
    }
    for (int i = 0; assigned < total; i = (i + 1) % 3) {
        if (ratio[i] > 0) {
            counts[i] += 1;
            assigned += 1;
        }
    }
    return counts;
}

std::vector<Vec3> surface_samples(const TriMesh& mesh, std::int64_t n, std::uint64_t seed) {
    require_arg(!mesh.empty(), "surface_samples: empty mesh");
    std::vector<double> cum(mesh.triangles.size());
    double total = 0.0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
        total += mesh.triangle_area(static_cast<int>(t));
        cum[t] = total;
    }
    require_arg(total > 0.0, "surface_samples: zero surface area");

    Rng rng(seed);
    std::vector<Vec3> out;
    out.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        const double u = rng.uniform(0.0, total);
        const std::size_t t = std::lower_bound(cum.begin(), cum.end(), u) - cum.begin();
        const auto& tri = mesh.triangles[std::min(t, mesh.triangles.size() - 1)];
        // uniform barycentric
        const double su = std::sqrt(rng.uniform());
        const double v = rng.uniform();
        const double b0 = 1.0 - su;
        const double b1 = su * (1.0 - v);
        const double b2 = su * v;
        out.push_back(b0 * mesh.vertices[tri[0]] + b1 * mesh.vertices[tri[1]] +
                      b2 * mesh.vertices[tri[2]]);
    }
    return out;
}

namespace {

Vec3 clamp_to_box(const Vec3& p, const Vec3& lo, const Vec3& hi) {
    Vec3 q = p;
    for (int a = 0; a < 3; ++a) q[a] = std::clamp(q[a], lo[a], hi[a]);
    return q;
}

Vec3 random_boundary_point(Rng& rng, const Vec3& lo, const Vec3& hi) {
    const int face = static_cast<int>(rng.index(6));
    const int axis = face / 2;
    Vec3 p = rng.uniform_in_box(lo, hi, 3);
    p[axis] = (face % 2) ? hi[axis] : lo[axis];
    return p;
}

template <class SignedDistFn, class FirstHitFn, class SurfacePointFn>
SampleSet run_protocol(const SamplingConfig& cfg, const std::string& source_id,
                       SignedDistFn&& sdf, FirstHitFn&& first_hit, SurfacePointFn&& surface_point) {
    require_arg(cfg.total > 0, "sample_points: total must be > 0");
    require_arg(cfg.sigma_near >= 0.0, "sample_points: sigma_near must be >= 0");

    const auto counts = ratio_counts(cfg.total, cfg.ratio);
    SampleSet set;
    set.dim = 3;
    set.source_id = source_id;
    set.seed = cfg.seed;
    set.counts = counts;
    set.samples.reserve(static_cast<std::size_t>(cfg.total));
    Rng rng(cfg.seed);

    for (std::int64_t i = 0; i < counts[0]; ++i) {
        const Vec3 p = rng.uniform_in_box(cfg.domain_lo, cfg.domain_hi, 3);
        set.samples.push_back({p, sdf(p), SampleSource::Uniform});
    }
    for (std::int64_t i = 0; i < counts[1]; ++i) {
        Vec3 p = surface_point(rng);
        for (int a = 0; a < 3; ++a) p[a] += cfg.sigma_near * rng.gaussian();
        p = clamp_to_box(p, cfg.domain_lo, cfg.domain_hi);
        set.samples.push_back({p, sdf(p), SampleSource::NearSurface});
    }
    std::int64_t ray_attempts = 0;
    const std::int64_t max_attempts = counts[2] * 1000 + 1000;
    for (std::int64_t i = 0; i < counts[2]; ++i) {
        for (;;) {
            if (++ray_attempts > max_attempts) {
                throw IngestError("sample_points: ray sampling failed to hit the surface");
            }
            const Vec3 origin = random_boundary_point(rng, cfg.domain_lo, cfg.domain_hi);
            const Vec3 target = rng.uniform_in_box(cfg.domain_lo, cfg.domain_hi, 3);
            const Vec3 dir = normalized(target - origin);
            if (norm2(dir) == 0.0) continue;
            const auto t = first_hit(origin, dir);
            if (!t) continue;
            Vec3 p = origin + (*t + rng.uniform(-cfg.sigma_near, cfg.sigma_near)) * dir;
            p = clamp_to_box(p, cfg.domain_lo, cfg.domain_hi);
            set.samples.push_back({p, sdf(p), SampleSource::Ray});
            break;
        }
    }
    return set;
}

}  // namespace

SampleSet sample_points(const MeshSdf& oracle, const SamplingConfig& cfg) {
    std::vector<Vec3> surface;
    std::size_t next = 0;
    const auto counts = ratio_counts(cfg.total, cfg.ratio);
    surface = surface_samples(oracle.mesh(), counts[1], cfg.seed ^ 0xa5a5a5a5ull);
    return run_protocol(
        cfg, "mesh",
        [&](const Vec3& p) { return oracle.signed_distance(p); },
        [&](const Vec3& o, const Vec3& d) { return oracle.first_hit(o, d); },
        [&](Rng&) { return surface[next++]; });
}

SampleSet sample_sphere_points(double radius, const SamplingConfig& cfg) {
    require_arg(radius > 0.0, "sample_sphere_points: radius must be > 0");
    return run_protocol(
        cfg, "sphere",
        [&](const Vec3& p) { return norm(p) - radius; },
        [&](const Vec3& o, const Vec3& d) -> std::optional<double> {
            // smallest positive root of |o + t d|^2 = r^2 for unit d
            const double b = dot(o, d);
            const double c = norm2(o) - radius * radius;
            const double disc = b * b - c;
            if (disc < 0.0) return std::nullopt;
            const double s = std::sqrt(disc);
            const double t0 = -b - s;
            const double t1 = -b + s;
            if (t0 > 1e-12) return t0;
            if (t1 > 1e-12) return t1;
            return std::nullopt;
        },
        [&](Rng& rng) { return radius * rng.unit_vector(); });
}

}  // namespace tg

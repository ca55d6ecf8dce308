#include "taylorgrid/sdf_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "taylorgrid/errors.hpp"
#include "taylorgrid/rng.hpp"

namespace tg {

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    const Vec3 ab = b - a;
    const Vec3 ac = c - a;
    const Vec3 ap = p - a;
    const double d1 = dot(ab, ap);
    const double d2 = dot(ac, ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;

    const Vec3 bp = p - b;
    const double d3 = dot(ab, bp);
    const double d4 = dot(ac, bp);
    if (d3 >= 0.0 && d4 <= d3) return b;

    const double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
        const double v = d1 / (d1 - d3);
        return a + v * ab;
    }

    const Vec3 cp = p - c;
    const double d5 = dot(ab, cp);
    const double d6 = dot(ac, cp);
    if (d6 >= 0.0 && d5 <= d6) return c;

    const double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
        const double w = d2 / (d2 - d6);
        return a + w * ac;
    }

    const double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + w * (c - b);
    }

    const double denom = 1.0 / (va + vb + vc);
    const double v = vb * denom;
    const double w = vc * denom;
    return a + v * ab + w * ac;
}

namespace {

struct Aabb {
    Vec3 lo{1e300, 1e300, 1e300};
    Vec3 hi{-1e300, -1e300, -1e300};

    void grow(const Vec3& p) {
        for (int a = 0; a < 3; ++a) {
            lo[a] = std::min(lo[a], p[a]);
            hi[a] = std::max(hi[a], p[a]);
        }
    }
    void grow(const Aabb& other) {
        grow(other.lo);
        grow(other.hi);
    }
    double dist2(const Vec3& p) const {
        double d2 = 0.0;
        for (int a = 0; a < 3; ++a) {
            const double d = p[a] < lo[a] ? lo[a] - p[a] : (p[a] > hi[a] ? p[a] - hi[a] : 0.0);
            d2 += d * d;
        }
        return d2;
    }
    bool ray_intersects(const Vec3& o, const Vec3& dir, const Vec3& inv_dir, double tmax) const {
        double t0 = 0.0;
        double t1 = tmax;
        for (int a = 0; a < 3; ++a) {
            if (dir[a] == 0.0) {
                if (o[a] < lo[a] || o[a] > hi[a]) return false;
                continue;
            }
            const double ta = (lo[a] - o[a]) * inv_dir[a];
            const double tb = (hi[a] - o[a]) * inv_dir[a];
            t0 = std::max(t0, std::min(ta, tb));
            t1 = std::min(t1, std::max(ta, tb));
        }
        return t0 <= t1;
    }
};

struct Node {
    Aabb box;
    int left = -1;    // internal: child indices; leaf: left == -1
    int begin = 0;    // leaf triangle range in order[]
    int end = 0;
};

// Moller-Trumbore; returns t > eps or nothing.
std::optional<double> ray_triangle(const Vec3& o, const Vec3& d, const Vec3& a, const Vec3& b,
                                   const Vec3& c) {
    constexpr double kEps = 1e-12;
    const Vec3 e1 = b - a;
    const Vec3 e2 = c - a;
    const Vec3 pv = cross(d, e2);
    const double det = dot(e1, pv);
    if (std::abs(det) < kEps) return std::nullopt;
    const double inv_det = 1.0 / det;
    const Vec3 tv = o - a;
    const double u = dot(tv, pv) * inv_det;
    if (u < 0.0 || u > 1.0) return std::nullopt;
    const Vec3 qv = cross(tv, e1);
    const double v = dot(d, qv) * inv_det;
    if (v < 0.0 || u + v > 1.0) return std::nullopt;
    const double t = dot(e2, qv) * inv_det;
    if (t <= kEps) return std::nullopt;
    return t;
}

}  // namespace

struct MeshSdf::Impl {
    TriMesh mesh;
    bool watertight = false;
    std::vector<Node> nodes;
    std::vector<int> order;  // triangle indices, leaf-contiguous
    Vec3 parity_dirs[3];

    int build(std::vector<int>& tris, std::vector<Aabb>& tri_boxes, std::vector<Vec3>& centroids,
              int begin, int end) {
        Node node;
        for (int i = begin; i < end; ++i) node.box.grow(tri_boxes[tris[i]]);
        const int id = static_cast<int>(nodes.size());
        nodes.push_back(node);
        if (end - begin <= 4) {
            nodes[id].begin = begin;
            nodes[id].end = end;
            return id;
        }
        Aabb cbox;
        for (int i = begin; i < end; ++i) cbox.grow(centroids[tris[i]]);
        int axis = 0;
        double best = -1.0;
        for (int a = 0; a < 3; ++a) {
            const double w = cbox.hi[a] - cbox.lo[a];
            if (w > best) {
                best = w;
                axis = a;
            }
        }
        const int mid = (begin + end) / 2;
        std::nth_element(tris.begin() + begin, tris.begin() + mid, tris.begin() + end,
                         [&](int x, int y) { return centroids[x][axis] < centroids[y][axis]; });
        const int l = build(tris, tri_boxes, centroids, begin, mid);
        const int r = build(tris, tri_boxes, centroids, mid, end);
        nodes[id].left = l;
        nodes[id].begin = r;  // repurposed as right child for internal nodes
        return id;
    }

    void closest(const Vec3& p, int node_id, double& best2, Vec3& best_point) const {
        const Node& node = nodes[node_id];
        if (node.box.dist2(p) >= best2) return;
        if (node.left < 0) {
            for (int i = node.begin; i < node.end; ++i) {
                const auto& tri = mesh.triangles[order[i]];
                const Vec3 q = closest_point_on_triangle(p, mesh.vertices[tri[0]],
                                                         mesh.vertices[tri[1]],
                                                         mesh.vertices[tri[2]]);
                const double d2 = norm2(p - q);
                if (d2 < best2) {
                    best2 = d2;
                    best_point = q;
                }
            }
            return;
        }
        const int l = node.left;
        const int r = node.begin;
        const double dl = nodes[l].box.dist2(p);
        const double dr = nodes[r].box.dist2(p);
        if (dl < dr) {
            closest(p, l, best2, best_point);
            closest(p, r, best2, best_point);
        } else {
            closest(p, r, best2, best_point);
            closest(p, l, best2, best_point);
        }
    }

    template <class Fn>
    void for_hits(const Vec3& o, const Vec3& d, Fn&& fn) const {
        const Vec3 inv{1.0 / d[0], 1.0 / d[1], 1.0 / d[2]};
        int stack[64];
        int top = 0;
        stack[top++] = 0;
        while (top > 0) {
            const Node& node = nodes[stack[--top]];
            if (!node.box.ray_intersects(o, d, inv, std::numeric_limits<double>::infinity())) {
                continue;
            }
            if (node.left < 0) {
                for (int i = node.begin; i < node.end; ++i) {
                    const auto& tri = mesh.triangles[order[i]];
                    if (auto t = ray_triangle(o, d, mesh.vertices[tri[0]], mesh.vertices[tri[1]],
                                              mesh.vertices[tri[2]])) {
                        fn(*t);
                    }
                }
            } else {
                stack[top++] = node.left;
                stack[top++] = node.begin;
            }
        }
    }
};

MeshSdf::MeshSdf(TriMesh mesh, std::uint64_t seed) : impl_(std::make_unique<Impl>()) {
    require_arg(!mesh.triangles.empty(), "MeshSdf: empty mesh");
    impl_->mesh = std::move(mesh);
    impl_->watertight = is_watertight(impl_->mesh);

    const int n = static_cast<int>(impl_->mesh.triangles.size());
    std::vector<Aabb> tri_boxes(n);
    std::vector<Vec3> centroids(n);
    for (int t = 0; t < n; ++t) {
        const auto& tri = impl_->mesh.triangles[t];
        for (int v = 0; v < 3; ++v) tri_boxes[t].grow(impl_->mesh.vertices[tri[v]]);
        centroids[t] = (1.0 / 3.0) * (impl_->mesh.vertices[tri[0]] + impl_->mesh.vertices[tri[1]] +
                                      impl_->mesh.vertices[tri[2]]);
    }
    impl_->order.resize(n);
    std::iota(impl_->order.begin(), impl_->order.end(), 0);
    impl_->nodes.reserve(2 * n);
    impl_->build(impl_->order, tri_boxes, centroids, 0, n);

    Rng rng(seed);
    for (auto& dir : impl_->parity_dirs) dir = rng.unit_vector();
}

MeshSdf::~MeshSdf() = default;
MeshSdf::MeshSdf(MeshSdf&&) noexcept = default;
MeshSdf& MeshSdf::operator=(MeshSdf&&) noexcept = default;

const TriMesh& MeshSdf::mesh() const { return impl_->mesh; }
bool MeshSdf::watertight() const { return impl_->watertight; }

Vec3 MeshSdf::closest_point(const Vec3& p) const {
    double best2 = std::numeric_limits<double>::infinity();
    Vec3 best{0, 0, 0};
    impl_->closest(p, 0, best2, best);
    return best;
}

double MeshSdf::unsigned_distance(const Vec3& p) const { return norm(p - closest_point(p)); }

int MeshSdf::count_ray_hits(const Vec3& origin, const Vec3& dir) const {
    int hits = 0;
    impl_->for_hits(origin, dir, [&](double) { ++hits; });
    return hits;
}

std::optional<double> MeshSdf::first_hit(const Vec3& origin, const Vec3& dir) const {
    std::optional<double> best;
    impl_->for_hits(origin, dir, [&](double t) {
        if (!best || t < *best) best = t;
    });
    return best;
}

int MeshSdf::sign(const Vec3& p) const {
    int inside_votes = 0;
    for (const Vec3& dir : impl_->parity_dirs) {
        if (count_ray_hits(p, dir) % 2 == 1) ++inside_votes;
    }
    return inside_votes >= 2 ? -1 : 1;
}

double MeshSdf::signed_distance(const Vec3& p) const {
    if (!impl_->watertight) {
        throw IngestError(
            "MeshSdf: signed distance requires a watertight mesh; use unsigned_distance");
    }
    return sign(p) * unsigned_distance(p);
}

}  // namespace tg

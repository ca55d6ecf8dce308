#include "taylorgrid/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "taylorgrid/errors.hpp"
#include "taylorgrid/rng.hpp"
#include "taylorgrid/sampling.hpp"

namespace tg {

namespace {

// Static median-split kd-tree over points, nearest-neighbour queries only.
class KdTree {
public:
    explicit KdTree(const std::vector<Vec3>& points) : points_(points) {
        index_.resize(points.size());
        std::iota(index_.begin(), index_.end(), 0);
        nodes_.reserve(2 * points.size() / kLeaf + 2);
        root_ = build(0, static_cast<int>(points.size()));
    }

    double nearest_dist2(const Vec3& q) const {
        double best = std::numeric_limits<double>::infinity();
        search(root_, q, best);
        return best;
    }

private:
    static constexpr int kLeaf = 8;
    struct Node {
        double split = 0.0;
        int axis = -1;  // -1 for leaves
        int left = -1, right = -1;
        int begin = 0, end = 0;
    };

    int build(int begin, int end) {
        Node node;
        if (end - begin <= kLeaf) {
            node.begin = begin;
            node.end = end;
            nodes_.push_back(node);
            return static_cast<int>(nodes_.size()) - 1;
        }
        Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
        for (int i = begin; i < end; ++i) {
            for (int a = 0; a < 3; ++a) {
                lo[a] = std::min(lo[a], points_[index_[i]][a]);
                hi[a] = std::max(hi[a], points_[index_[i]][a]);
            }
        }
        int axis = 0;
        for (int a = 1; a < 3; ++a) {
            if (hi[a] - lo[a] > hi[axis] - lo[axis]) axis = a;
        }
        const int mid = (begin + end) / 2;
        std::nth_element(index_.begin() + begin, index_.begin() + mid, index_.begin() + end,
                         [&](int x, int y) { return points_[x][axis] < points_[y][axis]; });
        node.axis = axis;
        node.split = points_[index_[mid]][axis];
        const int id = static_cast<int>(nodes_.size());
        nodes_.push_back(node);
        const int l = build(begin, mid);
        const int r = build(mid, end);
        nodes_[id].left = l;
        nodes_[id].right = r;
        return id;
    }

    void search(int node_id, const Vec3& q, double& best) const {
        const Node& node = nodes_[node_id];
        if (node.axis < 0) {
            for (int i = node.begin; i < node.end; ++i) {
                best = std::min(best, norm2(q - points_[index_[i]]));
            }
            return;
        }
        const double d = q[node.axis] - node.split;
        const int near = d < 0.0 ? node.left : node.right;
        const int far = d < 0.0 ? node.right : node.left;
        search(near, q, best);
        if (d * d < best) search(far, q, best);
    }

    const std::vector<Vec3>& points_;
    std::vector<int> index_;
    std::vector<Node> nodes_;
    int root_ = 0;
};

double directed_mean_nn(const std::vector<Vec3>& from, const std::vector<Vec3>& to) {
    const KdTree tree(to);
    double sum = 0.0;
    for (const Vec3& p : from) sum += std::sqrt(tree.nearest_dist2(p));
    return sum / static_cast<double>(from.size());
}

}  // namespace

IouResult iou(const FieldFn& field_a, const FieldFn& field_b, const IouOptions& opts) {
    require_arg(opts.samples > 0, "iou: sample count must be > 0");
    Rng rng(opts.seed);
    std::int64_t inter = 0;
    std::int64_t uni = 0;
    for (std::int64_t i = 0; i < opts.samples; ++i) {
        const Vec3 p = rng.uniform_in_box(opts.domain_lo, opts.domain_hi, opts.dim);
        const bool in_a = field_a(p) < 0.0;
        const bool in_b = field_b(p) < 0.0;
        inter += in_a && in_b;
        uni += in_a || in_b;
    }
    IouResult result;
    if (uni == 0) {
        result.iou = 1.0;
        result.empty_union = true;  // both fields entirely positive on the samples
    } else {
        result.iou = static_cast<double>(inter) / static_cast<double>(uni);
    }
    return result;
}

double chamfer_l1(const TriMesh& mesh_a, const TriMesh& mesh_b, std::int64_t n_points,
                  std::uint64_t seed) {
    require_arg(!mesh_a.empty() && !mesh_b.empty(), "chamfer_l1: empty mesh");
    require_arg(n_points > 0, "chamfer_l1: n_points must be > 0");
    const std::vector<Vec3> pa = surface_samples(mesh_a, n_points, seed);
    const std::vector<Vec3> pb = surface_samples(mesh_b, n_points, seed);
    return 0.5 * (directed_mean_nn(pa, pb) + directed_mean_nn(pb, pa));
}

double psnr(const ImageRGB& a, const ImageRGB& b) {
    require_arg(a.width == b.width && a.height == b.height && a.pixels.size() == b.pixels.size(),
                "psnr: image dimensions differ");
    require_arg(!a.pixels.empty(), "psnr: empty image");
    double se = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        const double d = a.pixels[i] - b.pixels[i];
        se += d * d;
    }
    const double mse = se / static_cast<double>(a.pixels.size());
    if (mse <= 0.0) return kPsnrCap;
    return std::min(kPsnrCap, 10.0 * std::log10(1.0 / mse));
}

}  // namespace tg

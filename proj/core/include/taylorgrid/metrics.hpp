#pragma once

#include <functional>

#include "taylorgrid/image.hpp"
#include "taylorgrid/mesh.hpp"

namespace tg {

using FieldFn = std::function<double(const Vec3&)>;

struct IouOptions {
    std::int64_t samples = 100000;
    std::uint64_t seed = 7;
    Vec3 domain_lo{-1.0, -1.0, -1.0};
    Vec3 domain_hi{1.0, 1.0, 1.0};
    int dim = 3;
};

/// Monte-Carlo IoU of the inside sets {f < 0}. Returns 1.0 (with
/// empty_union set) when neither field has an inside region among the samples.
struct IouResult {
    double iou = 1.0;
    bool empty_union = false;
};
IouResult iou(const FieldFn& field_a, const FieldFn& field_b, const IouOptions& opts = {});

/// Symmetric Chamfer-L1: area-weighted surface samples on each mesh, then
/// 0.5 * (mean nearest distance a->b + mean b->a). The same seed drives both
/// meshes' samplers, so cd(a,a) is exactly zero and cd is symmetric.
double chamfer_l1(const TriMesh& mesh_a, const TriMesh& mesh_b, std::int64_t n_points = 100000,
                  std::uint64_t seed = 7);

/// Value reported instead of infinity for identical images.
inline constexpr double kPsnrCap = 99.0;

/// 10 log10(1 / MSE) for images in [0,1]; capped at kPsnrCap.
double psnr(const ImageRGB& a, const ImageRGB& b);

}  // namespace tg

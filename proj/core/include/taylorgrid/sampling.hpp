#pragma once

#include <array>

#include "taylorgrid/sample_set.hpp"
#include "taylorgrid/sdf_oracle.hpp"

namespace tg {

struct SamplingConfig {
    std::int64_t total = 500000;
    std::array<int, 3> ratio{1, 2, 2};  // uniform : near-surface : ray
    double sigma_near = 0.02;
    std::uint64_t seed = 1;
    Vec3 domain_lo{-1.0, -1.0, -1.0};
    Vec3 domain_hi{1.0, 1.0, 1.0};
};

/// Split a total into per-source counts matching the ratio within rounding
/// (remainders go to the first sources).
std::array<std::int64_t, 3> ratio_counts(std::int64_t total, const std::array<int, 3>& ratio);

/// Area-weighted uniform points on the mesh surface.
std::vector<Vec3> surface_samples(const TriMesh& mesh, std::int64_t n, std::uint64_t seed);

/// The supervision protocol for mesh fixtures: uniform domain samples,
/// near-surface samples (surface points + isotropic Gaussian noise), and
/// boundary-launched rays whose hit points are jittered along the ray. Every
/// sample is labeled with the oracle's signed distance.
SampleSet sample_points(const MeshSdf& oracle, const SamplingConfig& cfg);

/// Same protocol against the analytic sphere |x| - radius (no mesh error).
SampleSet sample_sphere_points(double radius, const SamplingConfig& cfg);

}  // namespace tg

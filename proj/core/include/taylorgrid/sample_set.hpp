#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "taylorgrid/vec.hpp"

namespace tg {

enum class SampleSource : unsigned char { Uniform = 0, NearSurface = 1, Ray = 2 };

/// One supervised training point: position in normalized domain coordinates
/// and ground-truth signed distance (negative inside).
struct SdfSample {
    Vec3 point{0.0, 0.0, 0.0};
    double gt_sdf = 0.0;
    SampleSource source = SampleSource::Uniform;
};

struct SampleSet {
    std::vector<SdfSample> samples;
    int dim = 3;
    std::string source_id;                    // mesh path, image id, "sphere", ...
    std::array<std::int64_t, 3> counts{0, 0, 0};  // per SampleSource
    std::uint64_t seed = 0;
};

/// Binary ".sdfpts": magic "SDFP" | count u64 | dim u8 | records of
/// point (dim x f64) + gt_sdf f64 + source u8. Little-endian.
void save_sdfpts(const SampleSet& set, const std::filesystem::path& path);
SampleSet load_sdfpts(const std::filesystem::path& path);

}  // namespace tg

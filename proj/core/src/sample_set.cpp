#include "taylorgrid/sample_set.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "taylorgrid/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "sdfpts serialization assumes a little-endian host");

namespace tg {

namespace {
constexpr char kMagic[4] = {'S', 'D', 'F', 'P'};
}

void save_sdfpts(const SampleSet& set, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IngestError("sdfpts: cannot open for writing: " + path.string());
    os.write(kMagic, 4);
    const std::uint64_t count = set.samples.size();
    os.write(reinterpret_cast<const char*>(&count), sizeof(count));
    const std::uint8_t dim = static_cast<std::uint8_t>(set.dim);
    os.write(reinterpret_cast<const char*>(&dim), 1);
    for (const auto& s : set.samples) {
        os.write(reinterpret_cast<const char*>(s.point.data()),
                 static_cast<std::streamsize>(sizeof(double) * set.dim));
        os.write(reinterpret_cast<const char*>(&s.gt_sdf), sizeof(double));
        const std::uint8_t src = static_cast<std::uint8_t>(s.source);
        os.write(reinterpret_cast<const char*>(&src), 1);
    }
    if (!os) throw IngestError("sdfpts: write failed: " + path.string());
}

SampleSet load_sdfpts(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IngestError("sdfpts: cannot open: " + path.string());
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
        throw IngestError("sdfpts: bad magic in " + path.string());
    }
    std::uint64_t count = 0;
    std::uint8_t dim = 0;
    if (!is.read(reinterpret_cast<char*>(&count), sizeof(count)) ||
        !is.read(reinterpret_cast<char*>(&dim), 1)) {
        throw IngestError("sdfpts: truncated header in " + path.string());
    }
    if (dim != 2 && dim != 3) throw IngestError("sdfpts: unsupported dim");

    SampleSet set;
    set.dim = dim;
    set.source_id = path.string();
    set.samples.resize(count);
    for (auto& s : set.samples) {
        s.point = {0.0, 0.0, 0.0};
        std::uint8_t src = 0;
        if (!is.read(reinterpret_cast<char*>(s.point.data()),
                     static_cast<std::streamsize>(sizeof(double) * dim)) ||
            !is.read(reinterpret_cast<char*>(&s.gt_sdf), sizeof(double)) ||
            !is.read(reinterpret_cast<char*>(&src), 1)) {
            throw IngestError("sdfpts: truncated records in " + path.string());
        }
        if (src > 2) throw IngestError("sdfpts: bad source tag");
        s.source = static_cast<SampleSource>(src);
        set.counts[src] += 1;
    }
    return set;
}

}  // namespace tg

#include "taylorgrid/grid_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "taylorgrid/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "tgrid serialization assumes a little-endian host");

namespace tg {

namespace {

constexpr char kMagic[4] = {'T', 'G', 'R', 'D'};
constexpr std::uint32_t kVersion = 1;

template <class T>
void write_pod(std::ostream& os, const T& value) {
    os.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <class T>
T read_pod(std::istream& is, const char* what) {
    T value{};
    if (!is.read(reinterpret_cast<char*>(&value), sizeof(T))) {
        throw IngestError(std::string("tgrid: truncated file while reading ") + what);
    }
    return value;
}

}  // namespace

std::uint64_t tgrid_file_size(const GridSpec& spec, StoragePrecision precision) {
    const std::uint64_t header = 4 + 4 + 1 + 1 + 4ull * spec.dim + 8ull * spec.dim * 2 + 1;
    const std::uint64_t scalar = precision == StoragePrecision::F64 ? 8 : 4;
    return header + static_cast<std::uint64_t>(spec.coeff_total()) * scalar;
}

void save_tgrid(const TaylorGrid& grid, const std::filesystem::path& path,
                StoragePrecision precision) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IngestError("tgrid: cannot open for writing: " + path.string());
    const GridSpec& s = grid.spec;
    os.write(kMagic, 4);
    write_pod(os, kVersion);
    write_pod(os, static_cast<std::uint8_t>(s.dim));
    write_pod(os, static_cast<std::uint8_t>(s.order));
    for (int a = 0; a < s.dim; ++a) write_pod(os, static_cast<std::uint32_t>(s.resolution[a]));
    for (int a = 0; a < s.dim; ++a) write_pod(os, s.origin[a]);
    for (int a = 0; a < s.dim; ++a) write_pod(os, s.extent[a]);
    write_pod(os, static_cast<std::uint8_t>(precision));
    if (precision == StoragePrecision::F64) {
        os.write(reinterpret_cast<const char*>(grid.coeffs.data()),
                 static_cast<std::streamsize>(grid.coeffs.size() * sizeof(double)));
    } else {
        std::vector<float> narrow(grid.coeffs.begin(), grid.coeffs.end());
        os.write(reinterpret_cast<const char*>(narrow.data()),
                 static_cast<std::streamsize>(narrow.size() * sizeof(float)));
    }
    if (!os) throw IngestError("tgrid: write failed: " + path.string());
}

TaylorGrid load_tgrid(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IngestError("tgrid: cannot open: " + path.string());
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
        throw IngestError("tgrid: bad magic in " + path.string());
    }
    const auto version = read_pod<std::uint32_t>(is, "version");
    if (version != kVersion) {
        throw IngestError("tgrid: unsupported version " + std::to_string(version));
    }
    GridSpec spec;
    spec.dim = read_pod<std::uint8_t>(is, "dim");
    spec.order = read_pod<std::uint8_t>(is, "order");
    if (spec.dim != 2 && spec.dim != 3) {
        throw IngestError("tgrid: unsupported dim " + std::to_string(spec.dim));
    }
    for (int a = 0; a < spec.dim; ++a) {
        spec.resolution[a] = static_cast<int>(read_pod<std::uint32_t>(is, "resolution"));
    }
    for (int a = 0; a < spec.dim; ++a) spec.origin[a] = read_pod<double>(is, "origin");
    for (int a = 0; a < spec.dim; ++a) spec.extent[a] = read_pod<double>(is, "extent");
    const auto precision = static_cast<StoragePrecision>(read_pod<std::uint8_t>(is, "precision"));
    spec.validate();

    TaylorGrid grid;
    grid.spec = spec;
    const std::size_t n = static_cast<std::size_t>(spec.coeff_total());
    grid.coeffs.resize(n);
    if (precision == StoragePrecision::F64) {
        if (!is.read(reinterpret_cast<char*>(grid.coeffs.data()),
                     static_cast<std::streamsize>(n * sizeof(double)))) {
            throw IngestError("tgrid: truncated coefficient payload in " + path.string());
        }
    } else if (precision == StoragePrecision::F32) {
        std::vector<float> narrow(n);
        if (!is.read(reinterpret_cast<char*>(narrow.data()),
                     static_cast<std::streamsize>(n * sizeof(float)))) {
            throw IngestError("tgrid: truncated coefficient payload in " + path.string());
        }
        for (std::size_t i = 0; i < n; ++i) grid.coeffs[i] = narrow[i];
    } else {
        throw IngestError("tgrid: unknown precision flag");
    }
    return grid;
}

}  // namespace tg

#include "taylorgrid/sh.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "taylorgrid/errors.hpp"
#include "taylorgrid/taylor_grid.hpp"

static_assert(std::endian::native == std::endian::little,
              "shgrid serialization assumes a little-endian host");

namespace tg {

namespace {

constexpr double kC0 = 0.28209479177387814;
constexpr double kC1 = 0.4886025119029199;
constexpr double kC2[5] = {1.0925484305920792, -1.0925484305920792, 0.31539156525252005,
                           -1.0925484305920792, 0.5462742152960396};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct InterpWeights {
    CellRef ref;
    double w[8];
};

InterpWeights interp_weights(const GridSpec& spec, const Vec3& x) {
    InterpWeights iw;
    iw.ref = locate(spec, x);
    for (int i = 0; i < iw.ref.corner_count; ++i) {
        double w = 1.0;
        for (int a = 0; a < spec.dim; ++a) {
            const int bit = (i >> a) & 1;
            w *= bit ? iw.ref.local[a] : 1.0 - iw.ref.local[a];
        }
        iw.w[i] = w;
    }
    return iw;
}

}  // namespace

void sh_basis(int degree, const Vec3& dir, std::span<double> out) {
    require_arg(degree >= 0 && degree <= 2, "sh_basis: degree must be in [0,2]");
    require_arg(out.size() >= static_cast<std::size_t>((degree + 1) * (degree + 1)),
                "sh_basis: output span too small");
    out[0] = kC0;
    if (degree < 1) return;
    const double x = dir[0], y = dir[1], z = dir[2];
    out[1] = -kC1 * y;
    out[2] = kC1 * z;
    out[3] = -kC1 * x;
    if (degree < 2) return;
    out[4] = kC2[0] * x * y;
    out[5] = kC2[1] * y * z;
    out[6] = kC2[2] * (2.0 * z * z - x * x - y * y);
    out[7] = kC2[3] * x * z;
    out[8] = kC2[4] * (x * x - y * y);
}

SHColorGrid init_sh_grid(const GridSpec& spec, int degree) {
    spec.validate();
    require_arg(degree >= 0 && degree <= 2, "init_sh_grid: degree must be in [0,2]");
    SHColorGrid grid;
    grid.spec = spec;
    grid.spec.order = 0;
    grid.degree = degree;
    grid.coeffs.assign(static_cast<std::size_t>(spec.vertex_count()) * grid.channels(), 0.0);
    return grid;
}

Vec3 sh_color_pre(const SHColorGrid& grid, const Vec3& x, const Vec3& dir) {
    const int B = grid.basis_count();
    double basis[kMaxShBasis];
    sh_basis(grid.degree, dir, {basis, static_cast<std::size_t>(B)});
    const InterpWeights iw = interp_weights(grid.spec, x);

    Vec3 pre{0.0, 0.0, 0.0};
    const int C = grid.channels();
    for (int i = 0; i < iw.ref.corner_count; ++i) {
        const double* block = grid.coeffs.data() + iw.ref.vertex_ids[i] * C;
        for (int ch = 0; ch < 3; ++ch) {
            double acc = 0.0;
            const double* k = block + ch * B;
            for (int b = 0; b < B; ++b) acc += k[b] * basis[b];
            pre[ch] += iw.w[i] * acc;
        }
    }
    return pre;
}

Vec3 sh_color(const SHColorGrid& grid, const Vec3& x, const Vec3& dir) {
    const Vec3 pre = sh_color_pre(grid, x, dir);
    return {sigmoid(pre[0]), sigmoid(pre[1]), sigmoid(pre[2])};
}

CellRef sh_color_backprop(const SHColorGrid& grid, const Vec3& x, const Vec3& dir,
                          const Vec3& dl_dcolor, std::span<double> grad) {
    require_arg(grad.size() == grid.coeffs.size(), "sh_color_backprop: gradient buffer mismatch");
    const int B = grid.basis_count();
    double basis[kMaxShBasis];
    sh_basis(grid.degree, dir, {basis, static_cast<std::size_t>(B)});
    const InterpWeights iw = interp_weights(grid.spec, x);
    const Vec3 pre = sh_color_pre(grid, x, dir);

    Vec3 dl_dpre;
    for (int ch = 0; ch < 3; ++ch) {
        const double s = sigmoid(pre[ch]);
        dl_dpre[ch] = dl_dcolor[ch] * s * (1.0 - s);
    }
    const int C = grid.channels();
    for (int i = 0; i < iw.ref.corner_count; ++i) {
        double* block = grad.data() + iw.ref.vertex_ids[i] * C;
        for (int ch = 0; ch < 3; ++ch) {
            const double f = iw.w[i] * dl_dpre[ch];
            double* k = block + ch * B;
            for (int b = 0; b < B; ++b) k[b] += f * basis[b];
        }
    }
    return iw.ref;
}

SHColorGrid upsample_sh(const SHColorGrid& grid, const std::array<int, 3>& new_resolution) {
    for (int a = 0; a < grid.spec.dim; ++a) {
        require_arg(new_resolution[a] >= grid.spec.resolution[a],
                    "upsample_sh: resolution may not shrink");
    }
    SHColorGrid out;
    out.spec = grid.spec;
    out.spec.resolution = new_resolution;
    out.degree = grid.degree;
    out.coeffs = multilinear_resample(grid.spec, grid.coeffs, grid.channels(), new_resolution);
    return out;
}

namespace {
constexpr char kShMagic[4] = {'S', 'H', 'G', 'R'};
constexpr std::uint32_t kShVersion = 1;

template <class T>
void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T read_pod(std::istream& is, const char* what) {
    T v{};
    if (!is.read(reinterpret_cast<char*>(&v), sizeof(T))) {
        throw IngestError(std::string("shgrid: truncated file while reading ") + what);
    }
    return v;
}
}  // namespace

void save_shgrid(const SHColorGrid& grid, const std::filesystem::path& path,
                 StoragePrecision precision) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IngestError("shgrid: cannot open for writing: " + path.string());
    const GridSpec& s = grid.spec;
    os.write(kShMagic, 4);
    write_pod(os, kShVersion);
    write_pod(os, static_cast<std::uint8_t>(s.dim));
    write_pod(os, static_cast<std::uint8_t>(grid.degree));
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
    if (!os) throw IngestError("shgrid: write failed: " + path.string());
}

SHColorGrid load_shgrid(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IngestError("shgrid: cannot open: " + path.string());
    char magic[4];
    if (!is.read(magic, 4) || std::memcmp(magic, kShMagic, 4) != 0) {
        throw IngestError("shgrid: bad magic in " + path.string());
    }
    if (read_pod<std::uint32_t>(is, "version") != kShVersion) {
        throw IngestError("shgrid: unsupported version");
    }
    GridSpec spec;
    spec.dim = read_pod<std::uint8_t>(is, "dim");
    const int degree = read_pod<std::uint8_t>(is, "degree");
    if (spec.dim != 3) throw IngestError("shgrid: only 3D grids supported");
    for (int a = 0; a < spec.dim; ++a) {
        spec.resolution[a] = static_cast<int>(read_pod<std::uint32_t>(is, "resolution"));
    }
    for (int a = 0; a < spec.dim; ++a) spec.origin[a] = read_pod<double>(is, "origin");
    for (int a = 0; a < spec.dim; ++a) spec.extent[a] = read_pod<double>(is, "extent");
    const auto precision = static_cast<StoragePrecision>(read_pod<std::uint8_t>(is, "precision"));
    spec.order = 0;
    spec.validate();

    SHColorGrid grid = init_sh_grid(spec, degree);
    const std::size_t n = grid.coeffs.size();
    if (precision == StoragePrecision::F64) {
        if (!is.read(reinterpret_cast<char*>(grid.coeffs.data()),
                     static_cast<std::streamsize>(n * sizeof(double)))) {
            throw IngestError("shgrid: truncated payload in " + path.string());
        }
    } else if (precision == StoragePrecision::F32) {
        std::vector<float> narrow(n);
        if (!is.read(reinterpret_cast<char*>(narrow.data()),
                     static_cast<std::streamsize>(n * sizeof(float)))) {
            throw IngestError("shgrid: truncated payload in " + path.string());
        }
        for (std::size_t i = 0; i < n; ++i) grid.coeffs[i] = narrow[i];
    } else {
        throw IngestError("shgrid: unknown precision flag");
    }
    return grid;
}

}  // namespace tg

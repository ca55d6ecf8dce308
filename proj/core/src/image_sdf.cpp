#include "taylorgrid/image_sdf.hpp"

#include <cmath>
#include <limits>

#include "taylorgrid/errors.hpp"

namespace tg {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 1D squared distance transform of a sampled function (lower envelope of
// parabolas rooted at f).
void edt_1d(const double* f, double* out, int n, int* v, double* z) {
    int k = 0;
    v[0] = 0;
    z[0] = -kInf;
    z[1] = kInf;
    for (int q = 1; q < n; ++q) {
        if (f[q] == kInf) continue;
        if (f[v[0]] == kInf && k == 0) {
            v[0] = q;
            continue;
        }
        double s;
        for (;;) {
            const int p = v[k];
            s = ((f[q] + q * static_cast<double>(q)) - (f[p] + p * static_cast<double>(p))) /
                (2.0 * (q - p));
            if (s <= z[k]) {
                --k;
            } else {
                break;
            }
        }
        ++k;
        v[k] = q;
        z[k] = s;
        z[k + 1] = kInf;
    }
    k = 0;
    for (int q = 0; q < n; ++q) {
        while (z[k + 1] < q) ++k;
        const int p = v[k];
        out[q] = f[p] == kInf ? kInf : (q - p) * static_cast<double>(q - p) + f[p];
    }
}

}  // namespace

std::vector<double> squared_edt(const std::vector<char>& mask, int width, int height) {
    require_arg(static_cast<int>(mask.size()) == width * height, "squared_edt: mask size mismatch");
    std::vector<double> d(mask.size());
    for (std::size_t i = 0; i < mask.size(); ++i) d[i] = mask[i] ? 0.0 : kInf;

    const int n = std::max(width, height);
    std::vector<double> f(n), out(n);
    std::vector<int> v(n);
    std::vector<double> z(n + 1);

    for (int y = 0; y < height; ++y) {
        edt_1d(d.data() + static_cast<std::size_t>(y) * width, out.data(), width, v.data(),
               z.data());
        std::copy(out.begin(), out.begin() + width, d.begin() + static_cast<std::size_t>(y) * width);
    }
    for (int x = 0; x < width; ++x) {
        for (int y = 0; y < height; ++y) f[y] = d[static_cast<std::size_t>(y) * width + x];
        edt_1d(f.data(), out.data(), height, v.data(), z.data());
        for (int y = 0; y < height; ++y) d[static_cast<std::size_t>(y) * width + x] = out[y];
    }
    return d;
}

Sdf2D image_sdf(const ImageGray& img, double threshold) {
    require_arg(threshold > 0.0 && threshold < 1.0, "image_sdf: threshold must be in (0,1)");
    require_arg(img.width >= 2 && img.height >= 2, "image_sdf: image dimensions must be >= 2");

    const std::size_t n = img.pixels.size();
    std::vector<char> fg(n);
    std::size_t fg_count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        fg[i] = img.pixels[i] > threshold ? 1 : 0;
        fg_count += fg[i];
    }
    if (fg_count == 0 || fg_count == n) {
        throw IngestError("image_sdf: binarization produced no surface (all " +
                          std::string(fg_count == 0 ? "background" : "foreground") + ")");
    }
    std::vector<char> bg(n);
    for (std::size_t i = 0; i < n; ++i) bg[i] = fg[i] ? 0 : 1;

    const auto d_fg = squared_edt(fg, img.width, img.height);
    const auto d_bg = squared_edt(bg, img.width, img.height);

    Sdf2D out;
    out.width = img.width;
    out.height = img.height;
    out.diagonal_px = std::hypot(static_cast<double>(img.width), static_cast<double>(img.height));
    out.values.resize(n);
    const double inv_diag = 1.0 / out.diagonal_px;
    for (std::size_t i = 0; i < n; ++i) {
        out.values[i] = (std::sqrt(d_fg[i]) - std::sqrt(d_bg[i])) * inv_diag;
    }
    return out;
}

}  // namespace tg

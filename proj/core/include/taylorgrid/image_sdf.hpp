#pragma once

#include "taylorgrid/image.hpp"

namespace tg {

/// Dense per-pixel signed distance field derived from a binarized image.
/// `values` are normalized by the image diagonal; multiply by `diagonal_px`
/// to get pixel units. Negative inside the foreground.
struct Sdf2D {
    int width = 0;
    int height = 0;
    std::vector<double> values;
    double diagonal_px = 0.0;

    double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
    double at_px(int x, int y) const { return at(x, y) * diagonal_px; }
};

/// Exact squared Euclidean distance transform (Felzenszwalb-Huttenlocher):
/// for every pixel, squared distance to the nearest set pixel center.
std::vector<double> squared_edt(const std::vector<char>& mask, int width, int height);

/// Binarize at `threshold` (foreground = intensity > threshold), then combine
/// exact distance transforms of both sides: d(p, FG) - d(p, BG), normalized
/// by the image diagonal. Throws IngestError when no surface exists
/// (all-foreground or all-background).
Sdf2D image_sdf(const ImageGray& img, double threshold);

}  // namespace tg

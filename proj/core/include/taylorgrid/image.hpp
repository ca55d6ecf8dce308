#pragma once

#include <filesystem>
#include <vector>

namespace tg {

/// Row-major grayscale image, intensities in [0, 1].
struct ImageGray {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;

    double at(int x, int y) const { return pixels[static_cast<std::size_t>(y) * width + x]; }
    double& at(int x, int y) { return pixels[static_cast<std::size_t>(y) * width + x]; }
};

/// Row-major interleaved RGB image, channels in [0, 1].
struct ImageRGB {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;  // 3 * width * height

    const double* at(int x, int y) const {
        return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x);
    }
    double* at(int x, int y) { return pixels.data() + 3 * (static_cast<std::size_t>(y) * width + x); }

    static ImageRGB filled(int w, int h, double r, double g, double b);
};

/// Reads 8-bit (or 16-bit, rescaled) grayscale PNG or PGM; color PNGs are
/// converted with Rec. 709 luma.
ImageGray load_image_gray(const std::filesystem::path& path);

ImageRGB load_image_rgb(const std::filesystem::path& path);

/// 8-bit PNG writers; values are clamped to [0, 1] before quantization.
void save_png_gray(const ImageGray& img, const std::filesystem::path& path);
void save_png_rgb(const ImageRGB& img, const std::filesystem::path& path);

void save_pgm(const ImageGray& img, const std::filesystem::path& path);

}  // namespace tg

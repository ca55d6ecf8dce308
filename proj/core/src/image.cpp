#include "taylorgrid/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <memory>
#include <string>

#include <png.h>

#include "taylorgrid/errors.hpp"

namespace tg {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

unsigned char quantize(double v) {
    const double c = std::clamp(v, 0.0, 1.0);
    return static_cast<unsigned char>(std::lround(c * 255.0));
}

// Decodes any PNG to 8-bit RGB rows.
std::vector<std::vector<png_byte>> read_png_rgb8(const std::filesystem::path& path, int& width,
                                                 int& height) {
    FilePtr fp(std::fopen(path.string().c_str(), "rb"));
    if (!fp) throw IngestError("png: cannot open: " + path.string());

    png_byte header[8];
    if (std::fread(header, 1, 8, fp.get()) != 8 || png_sig_cmp(header, 0, 8) != 0) {
        throw IngestError("png: not a PNG file: " + path.string());
    }
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IngestError("png: allocation failure");
    }
    std::vector<std::vector<png_byte>> rows;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw IngestError("png: decode error in " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_sig_bytes(png, 8);
    png_read_info(png, info);

    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    const png_byte color_type = png_get_color_type(png, info);
    const png_byte bit_depth = png_get_bit_depth(png, info);

    if (bit_depth == 16) png_set_strip_16(png);
    if (color_type == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (color_type == PNG_COLOR_TYPE_GRAY || color_type == PNG_COLOR_TYPE_GRAY_ALPHA) {
        png_set_gray_to_rgb(png);
    }
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    rows.assign(height, std::vector<png_byte>(png_get_rowbytes(png, info)));
    std::vector<png_bytep> row_ptrs(height);
    for (int y = 0; y < height; ++y) row_ptrs[y] = rows[y].data();
    png_read_image(png, row_ptrs.data());
    png_destroy_read_struct(&png, &info, nullptr);
    return rows;
}

void write_png(const std::filesystem::path& path, int width, int height, int channels,
               const std::vector<unsigned char>& bytes) {
    FilePtr fp(std::fopen(path.string().c_str(), "wb"));
    if (!fp) throw IngestError("png: cannot open for writing: " + path.string());
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IngestError("png: allocation failure");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IngestError("png: encode error for " + path.string());
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, width, height, 8,
                 channels == 1 ? PNG_COLOR_TYPE_GRAY : PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
                 PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    std::vector<png_bytep> row_ptrs(height);
    for (int y = 0; y < height; ++y) {
        row_ptrs[y] = const_cast<png_bytep>(bytes.data() + static_cast<std::size_t>(y) * width * channels);
    }
    png_write_image(png, row_ptrs.data());
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

ImageGray load_pgm(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IngestError("pgm: cannot open: " + path.string());
    std::string magic;
    is >> magic;
    if (magic != "P5" && magic != "P2") throw IngestError("pgm: bad magic in " + path.string());
    auto next_int = [&]() {
        // skip whitespace and '#' comments
        for (;;) {
            const int c = is.peek();
            if (c == '#') {
                std::string line;
                std::getline(is, line);
            } else if (std::isspace(c)) {
                is.get();
            } else {
                break;
            }
        }
        long v = 0;
        if (!(is >> v)) throw IngestError("pgm: truncated header in " + path.string());
        return v;
    };
    const long w = next_int();
    const long h = next_int();
    const long maxval = next_int();
    if (w < 2 || h < 2 || maxval <= 0 || maxval > 65535) {
        throw IngestError("pgm: unsupported dimensions/maxval in " + path.string());
    }
    ImageGray img;
    img.width = static_cast<int>(w);
    img.height = static_cast<int>(h);
    img.pixels.resize(static_cast<std::size_t>(w) * h);
    if (magic == "P5") {
        is.get();  // single whitespace after maxval
        const int bytes = maxval > 255 ? 2 : 1;
        std::vector<unsigned char> raw(img.pixels.size() * bytes);
        if (!is.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()))) {
            throw IngestError("pgm: truncated pixel data in " + path.string());
        }
        for (std::size_t i = 0; i < img.pixels.size(); ++i) {
            const long v = bytes == 1 ? raw[i] : (raw[2 * i] << 8) | raw[2 * i + 1];
            img.pixels[i] = static_cast<double>(v) / maxval;
        }
    } else {
        for (auto& p : img.pixels) {
            long v = 0;
            if (!(is >> v)) throw IngestError("pgm: truncated ascii data in " + path.string());
            p = static_cast<double>(v) / maxval;
        }
    }
    return img;
}

bool has_ext(const std::filesystem::path& path, const char* ext) {
    std::string e = path.extension().string();
    std::transform(e.begin(), e.end(), e.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return e == ext;
}

}  // namespace

ImageRGB ImageRGB::filled(int w, int h, double r, double g, double b) {
    ImageRGB img;
    img.width = w;
    img.height = h;
    img.pixels.resize(static_cast<std::size_t>(3) * w * h);
    for (std::size_t i = 0; i < img.pixels.size(); i += 3) {
        img.pixels[i] = r;
        img.pixels[i + 1] = g;
        img.pixels[i + 2] = b;
    }
    return img;
}

ImageGray load_image_gray(const std::filesystem::path& path) {
    if (has_ext(path, ".pgm")) return load_pgm(path);
    int w = 0, h = 0;
    const auto rows = read_png_rgb8(path, w, h);
    if (w < 2 || h < 2) throw IngestError("image: dimensions must be >= 2: " + path.string());
    ImageGray img;
    img.width = w;
    img.height = h;
    img.pixels.resize(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const png_byte* px = rows[y].data() + 3 * x;
            img.at(x, y) = (0.2126 * px[0] + 0.7152 * px[1] + 0.0722 * px[2]) / 255.0;
        }
    }
    return img;
}

ImageRGB load_image_rgb(const std::filesystem::path& path) {
    if (has_ext(path, ".pgm")) {
        const ImageGray g = load_pgm(path);
        ImageRGB img;
        img.width = g.width;
        img.height = g.height;
        img.pixels.resize(static_cast<std::size_t>(3) * g.width * g.height);
        for (std::size_t i = 0; i < g.pixels.size(); ++i) {
            img.pixels[3 * i] = img.pixels[3 * i + 1] = img.pixels[3 * i + 2] = g.pixels[i];
        }
        return img;
    }
    int w = 0, h = 0;
    const auto rows = read_png_rgb8(path, w, h);
    ImageRGB img;
    img.width = w;
    img.height = h;
    img.pixels.resize(static_cast<std::size_t>(3) * w * h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const png_byte* px = rows[y].data() + 3 * x;
            double* dst = img.at(x, y);
            dst[0] = px[0] / 255.0;
            dst[1] = px[1] / 255.0;
            dst[2] = px[2] / 255.0;
        }
    }
    return img;
}

void save_png_gray(const ImageGray& img, const std::filesystem::path& path) {
    std::vector<unsigned char> bytes(img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i) bytes[i] = quantize(img.pixels[i]);
    write_png(path, img.width, img.height, 1, bytes);
}

void save_png_rgb(const ImageRGB& img, const std::filesystem::path& path) {
    std::vector<unsigned char> bytes(img.pixels.size());
    for (std::size_t i = 0; i < img.pixels.size(); ++i) bytes[i] = quantize(img.pixels[i]);
    write_png(path, img.width, img.height, 3, bytes);
}

void save_pgm(const ImageGray& img, const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IngestError("pgm: cannot open for writing: " + path.string());
    os << "P5\n" << img.width << " " << img.height << "\n255\n";
    for (double p : img.pixels) os.put(static_cast<char>(quantize(p)));
}

}  // namespace tg

#include "radarcs/export.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

#include "radarcs/errors.hpp"

namespace radarcs {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const {
        if (f) std::fclose(f);
    }
};

void write_gray8(const std::vector<std::uint8_t>& pixels, int width, int height,
                 const std::string& path) {
    std::unique_ptr<std::FILE, FileCloser> fp(std::fopen(path.c_str(), "wb"));
    if (!fp) throw IoError("cannot open " + path + " for writing");
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        png_destroy_write_struct(&png, &info);
        throw IoError("libpng init failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw IoError("PNG write failed for " + path);
    }
    png_init_io(png, fp.get());
    png_set_IHDR(png, info, static_cast<png_uint_32>(width), static_cast<png_uint_32>(height), 8,
                 PNG_COLOR_TYPE_GRAY, PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < height; ++y)
        png_write_row(png, const_cast<png_bytep>(pixels.data() + static_cast<std::size_t>(y) * width));
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
}

}  // namespace

void export_png(const PolarFrame& frame, const std::string& path, const ExportOptions& options) {
    frame.validate();
    int cols = frame.range_bins;
    if (options.display_range_m) {
        if (*options.display_range_m <= 0) throw ParamError("export: display range must be > 0");
        cols = std::min(cols, static_cast<int>(std::floor(*options.display_range_m /
                                                          frame.range_resolution_m)));
        cols = std::max(cols, 1);
    }

    double peak = 0.0;
    for (int a = 0; a < frame.azimuth_bins; ++a)
        for (int r = 0; r < cols; ++r) peak = std::max(peak, frame.at(a, r));
    const double scale = peak > 0.0 ? 255.0 / peak : 0.0;

    if (!options.cartesian) {
        std::vector<std::uint8_t> pixels(static_cast<std::size_t>(frame.azimuth_bins) * cols);
        for (int a = 0; a < frame.azimuth_bins; ++a)
            for (int r = 0; r < cols; ++r)
                pixels[static_cast<std::size_t>(a) * cols + r] =
                    static_cast<std::uint8_t>(std::clamp(frame.at(a, r) * scale, 0.0, 255.0));
        write_gray8(pixels, cols, frame.azimuth_bins, path);
        return;
    }

    const int size = std::max(3, options.cartesian_pixels);
    const double half = (size - 1) / 2.0;
    const double bins_per_pixel = static_cast<double>(cols) / half;
    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(size) * size, 0);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const double dx = x - half;
            const double dy = half - y;  // north (azimuth 0) up
            const double r_bin = std::hypot(dx, dy) * bins_per_pixel;
            if (r_bin >= cols) continue;
            double az = std::atan2(dx, dy) * 180.0 / M_PI;
            if (az < 0) az += 360.0;
            int a = static_cast<int>(az / frame.azimuth_resolution_deg);
            a = std::min(a, frame.azimuth_bins - 1);
            const int r = std::min(static_cast<int>(r_bin), cols - 1);
            pixels[static_cast<std::size_t>(y) * size + x] =
                static_cast<std::uint8_t>(std::clamp(frame.at(a, r) * scale, 0.0, 255.0));
        }
    }
    write_gray8(pixels, size, size, path);
}

}  // namespace radarcs

#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace boxrefine {

struct Rgb {
    uint8_t r = 0, g = 0, b = 0;
    bool operator==(const Rgb&) const = default;
};

struct Pt2 {
    double x = 0, y = 0;
};

// Continuous-coordinate crop rectangle in source pixel units.
struct CropRect {
    double x = 0, y = 0, w = 0, h = 0;
    bool operator==(const CropRect&) const = default;
};

// Interleaved 8-bit RGB raster.
struct Image {
    int width = 0, height = 0;
    std::vector<uint8_t> data;

    static Image filled(int w, int h, Rgb color);

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height;
    }
    Rgb get(int x, int y) const {
        const size_t i = 3 * (size_t(y) * width + x);
        return {data[i], data[i + 1], data[i + 2]};
    }
    void set(int x, int y, Rgb c) {
        const size_t i = 3 * (size_t(y) * width + x);
        data[i] = c.r;
        data[i + 1] = c.g;
        data[i + 2] = c.b;
    }
    bool operator==(const Image&) const = default;
};

// Binary PPM (P6), the lossless interchange format used throughout.
void write_ppm(const Image& img, const std::string& path);
Image read_ppm(const std::string& path);

// Crop `rect` from `src` and resample to size x size. Bilinear keeps
// photographic content smooth; nearest preserves exact categorical
// colors.
Image crop_resize_bilinear(const Image& src, const CropRect& rect, int size);
Image crop_resize_nearest(const Image& src, const CropRect& rect, int size);

// Fills pixels whose centers fall inside the convex polygon (scanline).
void fill_convex(Image& img, std::span<const Pt2> poly, Rgb color);

// 1-pixel line through continuous pixel coordinates; clipped to the
// image before stepping.
void draw_line(Image& img, Pt2 a, Pt2 b, Rgb color);

}  // namespace boxrefine

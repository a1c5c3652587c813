#include "boxrefine/image.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

namespace boxrefine {

Image Image::filled(int w, int h, Rgb color) {
    Image img;
    img.width = w;
    img.height = h;
    img.data.resize(size_t(w) * h * 3);
    for (size_t i = 0; i < img.data.size(); i += 3) {
        img.data[i] = color.r;
        img.data[i + 1] = color.g;
        img.data[i + 2] = color.b;
    }
    return img;
}

void write_ppm(const Image& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "P6\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.data.data()),
              std::streamsize(img.data.size()));
    if (!out) throw std::runtime_error("short write: " + path);
}

namespace {

int next_token(std::istream& in) {
    // skips whitespace and '#' comments per the netpbm grammar
    while (true) {
        int c = in.peek();
        if (c == '#') {
            while (c != '\n' && c != EOF) c = in.get();
        } else if (std::isspace(c)) {
            in.get();
        } else {
            break;
        }
    }
    int value = 0;
    in >> value;
    return value;
}

}  // namespace

Image read_ppm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string magic;
    in >> magic;
    if (magic != "P6") throw std::runtime_error("not a P6 ppm: " + path);
    Image img;
    img.width = next_token(in);
    img.height = next_token(in);
    const int maxval = next_token(in);
    if (img.width <= 0 || img.height <= 0 || maxval != 255)
        throw std::runtime_error("unsupported ppm header: " + path);
    in.get();  // single whitespace after maxval
    img.data.resize(size_t(img.width) * img.height * 3);
    in.read(reinterpret_cast<char*>(img.data.data()), std::streamsize(img.data.size()));
    if (in.gcount() != std::streamsize(img.data.size()))
        throw std::runtime_error("truncated ppm: " + path);
    return img;
}

Image crop_resize_bilinear(const Image& src, const CropRect& rect, int size) {
    Image out = Image::filled(size, size, {0, 0, 0});
    const double sx = rect.w / size;
    const double sy = rect.h / size;
    for (int oy = 0; oy < size; ++oy) {
        const double fy = rect.y + (oy + 0.5) * sy - 0.5;
        const int y0 = std::clamp(int(std::floor(fy)), 0, src.height - 1);
        const int y1 = std::min(y0 + 1, src.height - 1);
        const double wy = std::clamp(fy - y0, 0.0, 1.0);
        for (int ox = 0; ox < size; ++ox) {
            const double fx = rect.x + (ox + 0.5) * sx - 0.5;
            const int x0 = std::clamp(int(std::floor(fx)), 0, src.width - 1);
            const int x1 = std::min(x0 + 1, src.width - 1);
            const double wx = std::clamp(fx - x0, 0.0, 1.0);
            const Rgb c00 = src.get(x0, y0), c10 = src.get(x1, y0);
            const Rgb c01 = src.get(x0, y1), c11 = src.get(x1, y1);
            auto mix = [&](double a, double b, double c, double d) {
                const double top = a * (1 - wx) + b * wx;
                const double bot = c * (1 - wx) + d * wx;
                return uint8_t(std::lround(top * (1 - wy) + bot * wy));
            };
            out.set(ox, oy, {mix(c00.r, c10.r, c01.r, c11.r),
                             mix(c00.g, c10.g, c01.g, c11.g),
                             mix(c00.b, c10.b, c01.b, c11.b)});
        }
    }
    return out;
}

Image crop_resize_nearest(const Image& src, const CropRect& rect, int size) {
    Image out = Image::filled(size, size, {0, 0, 0});
    for (int oy = 0; oy < size; ++oy) {
        const int sy = std::clamp(
            int(std::floor(rect.y + (oy + 0.5) * rect.h / size)), 0, src.height - 1);
        for (int ox = 0; ox < size; ++ox) {
            const int sx = std::clamp(
                int(std::floor(rect.x + (ox + 0.5) * rect.w / size)), 0, src.width - 1);
            out.set(ox, oy, src.get(sx, sy));
        }
    }
    return out;
}

void fill_convex(Image& img, std::span<const Pt2> poly, Rgb color) {
    if (poly.size() < 3) return;
    double ymin = poly[0].y, ymax = poly[0].y;
    for (const Pt2& p : poly) {
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    const int row0 = std::max(0, int(std::floor(ymin)));
    const int row1 = std::min(img.height - 1, int(std::ceil(ymax)));
    const size_t n = poly.size();
    for (int row = row0; row <= row1; ++row) {
        const double yc = row + 0.5;
        double xlo = std::numeric_limits<double>::infinity();
        double xhi = -xlo;
        for (size_t i = 0; i < n; ++i) {
            const Pt2& a = poly[i];
            const Pt2& b = poly[(i + 1) % n];
            if ((a.y > yc) == (b.y > yc)) continue;
            const double t = (yc - a.y) / (b.y - a.y);
            const double x = a.x + t * (b.x - a.x);
            xlo = std::min(xlo, x);
            xhi = std::max(xhi, x);
        }
        if (!(xlo <= xhi)) continue;
        // pixel centers x+0.5 within [xlo, xhi]
        const int c0 = std::max(0, int(std::ceil(xlo - 0.5)));
        const int c1 = std::min(img.width - 1, int(std::floor(xhi - 0.5)));
        for (int col = c0; col <= c1; ++col) img.set(col, row, color);
    }
}

namespace {

// Liang-Barsky clip of segment a-b to the rectangle [0,w]x[0,h].
bool clip_segment(Pt2& a, Pt2& b, double w, double h) {
    double t0 = 0, t1 = 1;
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {a.x, w - a.x, a.y, h - a.y};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0) {
            if (q[i] < 0) return false;
        } else {
            const double r = q[i] / p[i];
            if (p[i] < 0) {
                if (r > t1) return false;
                t0 = std::max(t0, r);
            } else {
                if (r < t0) return false;
                t1 = std::min(t1, r);
            }
        }
    }
    const Pt2 na{a.x + t0 * dx, a.y + t0 * dy};
    const Pt2 nb{a.x + t1 * dx, a.y + t1 * dy};
    a = na;
    b = nb;
    return true;
}

}  // namespace

void draw_line(Image& img, Pt2 a, Pt2 b, Rgb color) {
    if (!clip_segment(a, b, img.width, img.height)) return;
    const double dx = b.x - a.x, dy = b.y - a.y;
    const int steps = std::max(1, int(std::ceil(std::max(std::abs(dx), std::abs(dy)))));
    for (int i = 0; i <= steps; ++i) {
        const double t = double(i) / steps;
        const int px = int(std::floor(a.x + t * dx));
        const int py = int(std::floor(a.y + t * dy));
        if (img.in_bounds(px, py)) img.set(px, py, color);
    }
}

}  // namespace boxrefine

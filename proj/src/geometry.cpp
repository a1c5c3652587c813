#include "boxrefine/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace boxrefine {

double wrap_angle(double theta) {
    double t = std::fmod(theta + M_PI, 2.0 * M_PI);
    if (t < 0) t += 2.0 * M_PI;
    return t - M_PI;
}

std::array<Vec3, 8> corners(const Box3D& box) {
    const double c = std::cos(box.theta);
    const double s = std::sin(box.theta);
    const double hl = box.l / 2, hw = box.w / 2;
    // plan offsets (local x = length axis, local z = width axis)
    const double lx[4] = {+hl, +hl, -hl, -hl};
    const double lz[4] = {+hw, -hw, -hw, +hw};
    std::array<Vec3, 8> out;
    for (int i = 0; i < 4; ++i) {
        const double wx = c * lx[i] + s * lz[i];
        const double wz = -s * lx[i] + c * lz[i];
        out[i] = {box.x + wx, box.y, box.z + wz};
        out[i + 4] = {box.x + wx, box.y - box.h, box.z + wz};
    }
    return out;
}

CameraModel CameraModel::make(const std::array<double, 12>& k, int width, int height) {
    CameraModel cam;
    cam.K = k;
    cam.image_width = width;
    cam.image_height = height;
    const double scale = k[10];
    if (scale != 0.0 && scale != 1.0) {
        for (double& v : cam.K) v /= scale;
    }
    return cam;
}

CameraModel CameraModel::pinhole(double focal, double cu, double cv, int width, int height) {
    return make({focal, 0, cu, 0,
                 0, focal, cv, 0,
                 0, 0, 1, 0},
                width, height);
}

ProjectedBox project_box(const Box3D& box, const CameraModel& cam) {
    const auto pts = corners(box);
    ProjectedBox pb;
    double u0 = std::numeric_limits<double>::infinity(), v0 = u0;
    double u1 = -u0, v1 = -u0;
    for (int i = 0; i < 8; ++i) {
        const auto& K = cam.K;
        const Vec3& p = pts[i];
        const double pu = K[0] * p.x + K[1] * p.y + K[2] * p.z + K[3];
        const double pv = K[4] * p.x + K[5] * p.y + K[6] * p.z + K[7];
        const double pw = K[8] * p.x + K[9] * p.y + K[10] * p.z + K[11];
        if (pw <= 0) throw BehindCamera{};
        pb.px[i] = {pu / pw, pv / pw};
        pb.depth[i] = pw;
        u0 = std::min(u0, pb.px[i].u);
        u1 = std::max(u1, pb.px[i].u);
        v0 = std::min(v0, pb.px[i].v);
        v1 = std::max(v1, pb.px[i].v);
    }
    pb.u_min = std::clamp(u0, 0.0, double(cam.image_width));
    pb.u_max = std::clamp(u1, 0.0, double(cam.image_width));
    pb.v_min = std::clamp(v0, 0.0, double(cam.image_height));
    pb.v_max = std::clamp(v1, 0.0, double(cam.image_height));
    return pb;
}

WorldDisplacement axial_to_world(const AxialDisplacement& d, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {d.dz_a * c + d.dx_a * s,
            d.dy_a,
            d.dz_a * (-s) + d.dx_a * c};
}

AxialDisplacement world_to_axial(const WorldDisplacement& d, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    // inverse of the rotation above
    return {d.dx * s + d.dz * c,
            d.dy,
            d.dx * c - d.dz * s};
}

std::array<std::array<double, 2>, 4> footprint(const Box3D& box) {
    const auto pts = corners(box);
    std::array<std::array<double, 2>, 4> out;
    for (int i = 0; i < 4; ++i) out[i] = {pts[i].x, pts[i].z};
    return out;
}

namespace {

using Poly = std::vector<std::array<double, 2>>;

double signed_area(const Poly& p) {
    double a = 0;
    const size_t n = p.size();
    for (size_t i = 0; i < n; ++i) {
        const auto& p0 = p[i];
        const auto& p1 = p[(i + 1) % n];
        a += p0[0] * p1[1] - p1[0] * p0[1];
    }
    return a / 2;
}

// Removes duplicate and collinear vertices before the shoelace step.
Poly dedupe(const Poly& p, double eps) {
    Poly out;
    const size_t n = p.size();
    for (size_t i = 0; i < n; ++i) {
        const auto& prev = p[(i + n - 1) % n];
        const auto& cur = p[i];
        const auto& next = p[(i + 1) % n];
        const double ex0 = cur[0] - prev[0], ey0 = cur[1] - prev[1];
        const double ex1 = next[0] - cur[0], ey1 = next[1] - cur[1];
        if (std::abs(ex1) < eps && std::abs(ey1) < eps) continue;  // duplicate of next
        const double cross = ex0 * ey1 - ey0 * ex1;
        if (std::abs(cross) < eps && ex0 * ex1 + ey0 * ey1 > 0) continue;  // collinear
        out.push_back(cur);
    }
    return out;
}

// Sutherland-Hodgman clip of `subject` against convex `clip` (must be CCW).
Poly clip_convex(Poly subject, const Poly& clip) {
    const size_t m = clip.size();
    for (size_t e = 0; e < m && !subject.empty(); ++e) {
        const auto& a = clip[e];
        const auto& b = clip[(e + 1) % m];
        const double ex = b[0] - a[0], ey = b[1] - a[1];
        auto inside = [&](const std::array<double, 2>& p) {
            return ex * (p[1] - a[1]) - ey * (p[0] - a[0]) >= 0;
        };
        auto intersect = [&](const std::array<double, 2>& p,
                             const std::array<double, 2>& q) -> std::array<double, 2> {
            const double dpx = q[0] - p[0], dpy = q[1] - p[1];
            const double denom = ex * dpy - ey * dpx;
            const double t = (ex * (a[1] - p[1]) - ey * (a[0] - p[0])) / denom;
            return {p[0] + t * dpx, p[1] + t * dpy};
        };
        Poly out;
        const size_t n = subject.size();
        for (size_t i = 0; i < n; ++i) {
            const auto& cur = subject[i];
            const auto& nxt = subject[(i + 1) % n];
            const bool cin = inside(cur), nin = inside(nxt);
            if (cin) {
                out.push_back(cur);
                if (!nin) out.push_back(intersect(cur, nxt));
            } else if (nin) {
                out.push_back(intersect(cur, nxt));
            }
        }
        subject = std::move(out);
    }
    return subject;
}

Poly ccw_footprint(const Box3D& box) {
    const auto f = footprint(box);
    Poly p(f.begin(), f.end());
    if (signed_area(p) < 0) std::reverse(p.begin(), p.end());
    return p;
}

}  // namespace

double footprint_intersection_area(const Box3D& a, const Box3D& b) {
    Poly inter = clip_convex(ccw_footprint(a), ccw_footprint(b));
    if (inter.size() < 3) return 0;
    inter = dedupe(inter, 1e-9);
    if (inter.size() < 3) return 0;
    return std::abs(signed_area(inter));
}

double iou_bev(const Box3D& a, const Box3D& b) {
    const double inter = footprint_intersection_area(a, b);
    if (inter <= 0) return 0;
    const double uni = a.w * a.l + b.w * b.l - inter;
    if (uni <= 0) return 0;
    return inter / uni;
}

double iou_3d(const Box3D& a, const Box3D& b) {
    const double area = footprint_intersection_area(a, b);
    if (area <= 0) return 0;
    // y points down: a box spans [y - h, y]
    const double overlap =
        std::min(a.y, b.y) - std::max(a.y - a.h, b.y - b.h);
    if (overlap <= 0) return 0;
    const double inter = area * overlap;
    const double uni = a.volume() + b.volume() - inter;
    if (uni <= 0) return 0;
    return std::min(inter / uni, 1.0);
}

}  // namespace boxrefine

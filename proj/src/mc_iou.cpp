#include "boxrefine/mc_iou.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace boxrefine {

bool point_in_footprint(double px, double pz, const Box3D& box) {
    const double dx = px - box.x;
    const double dz = pz - box.z;
    const double c = std::cos(box.theta);
    const double s = std::sin(box.theta);
    // rotate into the box frame: local x = length axis, local z = width axis
    const double lx = c * dx - s * dz;
    const double lz = s * dx + c * dz;
    return std::abs(lx) <= box.l / 2 && std::abs(lz) <= box.w / 2;
}

bool point_in_box(double px, double py, double pz, const Box3D& box) {
    if (py > box.y || py < box.y - box.h) return false;
    return point_in_footprint(px, pz, box);
}

namespace {

struct Bounds {
    double lo[3] = {1e300, 1e300, 1e300};
    double hi[3] = {-1e300, -1e300, -1e300};
    void add(const Box3D& box) {
        for (const Vec3& p : corners(box)) {
            lo[0] = std::min(lo[0], p.x);
            hi[0] = std::max(hi[0], p.x);
            lo[1] = std::min(lo[1], p.y);
            hi[1] = std::max(hi[1], p.y);
            lo[2] = std::min(lo[2], p.z);
            hi[2] = std::max(hi[2], p.z);
        }
    }
};

}  // namespace

double mc_iou_bev(const Box3D& a, const Box3D& b, int samples, uint64_t seed) {
    Bounds bb;
    bb.add(a);
    bb.add(b);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(bb.lo[0], bb.hi[0]);
    std::uniform_real_distribution<double> uz(bb.lo[2], bb.hi[2]);
    long inter = 0, uni = 0;
    for (int i = 0; i < samples; ++i) {
        const double px = ux(rng), pz = uz(rng);
        const bool ina = point_in_footprint(px, pz, a);
        const bool inb = point_in_footprint(px, pz, b);
        inter += ina && inb;
        uni += ina || inb;
    }
    return uni == 0 ? 0.0 : double(inter) / double(uni);
}

double mc_iou_3d(const Box3D& a, const Box3D& b, int samples, uint64_t seed) {
    Bounds bb;
    bb.add(a);
    bb.add(b);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(bb.lo[0], bb.hi[0]);
    std::uniform_real_distribution<double> uy(bb.lo[1], bb.hi[1]);
    std::uniform_real_distribution<double> uz(bb.lo[2], bb.hi[2]);
    long inter = 0, uni = 0;
    for (int i = 0; i < samples; ++i) {
        const double px = ux(rng), py = uy(rng), pz = uz(rng);
        const bool ina = point_in_box(px, py, pz, a);
        const bool inb = point_in_box(px, py, pz, b);
        inter += ina && inb;
        uni += ina || inb;
    }
    return uni == 0 ? 0.0 : double(inter) / double(uni);
}

}  // namespace boxrefine

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "boxrefine/geometry.hpp"
#include "boxrefine/mc_iou.hpp"
#include "test_util.hpp"

using namespace boxrefine;
using testutil::offset_partner;
using testutil::random_box;

namespace {

double dist(const Vec3& a, const Vec3& b) {
    return std::sqrt((a.x - b.x) * (a.x - b.x) + (a.y - b.y) * (a.y - b.y) +
                     (a.z - b.z) * (a.z - b.z));
}

}  // namespace

TEST_CASE("wrap_angle maps into [-pi, pi)") {
    CHECK(wrap_angle(0) == doctest::Approx(0));
    CHECK(wrap_angle(M_PI) == doctest::Approx(-M_PI));
    CHECK(wrap_angle(-M_PI) == doctest::Approx(-M_PI));
    CHECK(wrap_angle(3 * M_PI / 2) == doctest::Approx(-M_PI / 2));
    CHECK(wrap_angle(7 * M_PI) == doctest::Approx(-M_PI));
    for (double t = -20; t < 20; t += 0.37) {
        const double w = wrap_angle(t);
        CHECK(w >= -M_PI);
        CHECK(w < M_PI);
        CHECK(std::abs(std::sin(w) - std::sin(t)) < 1e-9);
        CHECK(std::abs(std::cos(w) - std::cos(t)) < 1e-9);
    }
}

TEST_CASE("corners of the unit cube at theta=0") {
    Box3D box{0, 0, 0, 1, 1, 1, 0};
    const auto pts = corners(box);
    // bottom face at y=0, top at y=-1, extents +-0.5 in x and z
    for (int i = 0; i < 4; ++i) {
        CHECK(pts[i].y == doctest::Approx(0));
        CHECK(pts[i + 4].y == doctest::Approx(-1));
    }
    std::multiset<std::pair<int, int>> plan;
    for (int i = 0; i < 4; ++i)
        plan.insert({int(std::round(pts[i].x * 2)), int(std::round(pts[i].z * 2))});
    std::multiset<std::pair<int, int>> expect = {{1, 1}, {1, -1}, {-1, -1}, {-1, 1}};
    CHECK(plan == expect);
}

TEST_CASE("corners at theta=pi/2 are the theta=0 set with x/z exchanged") {
    Box3D base{0, 0, 0, 1, 1, 1, 0};
    Box3D rot = base;
    rot.theta = M_PI / 2;
    const auto p0 = corners(base);
    const auto p1 = corners(rot);
    // rotation by pi/2 about y maps (x, z) -> (z, -x)
    for (int i = 0; i < 8; ++i) {
        bool found = false;
        for (int k = 0; k < 8; ++k) {
            if (std::abs(p1[k].x - p0[i].z) < 1e-12 &&
                std::abs(p1[k].z - (-p0[i].x)) < 1e-12 &&
                std::abs(p1[k].y - p0[i].y) < 1e-12) {
                found = true;
                break;
            }
        }
        CHECK(found);
    }
}

TEST_CASE("corner pairwise distances match the closed-form edge lengths") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        const Box3D b = random_box(rng);
        const auto pts = corners(b);
        // the multiset of all 28 pairwise distances is determined by
        // (w, l, h) alone
        std::multiset<long> got, want;
        auto push = [](std::multiset<long>& s, double d) {
            s.insert(std::lround(d * 1e7));
        };
        for (int i = 0; i < 8; ++i)
            for (int k = i + 1; k < 8; ++k) push(got, dist(pts[i], pts[k]));
        const double w = b.w, l = b.l, h = b.h;
        // 4 edges of each length
        for (int i = 0; i < 4; ++i) push(want, w);
        for (int i = 0; i < 4; ++i) push(want, l);
        for (int i = 0; i < 4; ++i) push(want, h);
        // face diagonals: 2 per face
        for (int i = 0; i < 2; ++i) push(want, std::hypot(w, l));
        for (int i = 0; i < 2; ++i) push(want, std::hypot(w, l));
        for (int i = 0; i < 2; ++i) push(want, std::hypot(w, h));
        for (int i = 0; i < 2; ++i) push(want, std::hypot(w, h));
        for (int i = 0; i < 2; ++i) push(want, std::hypot(l, h));
        for (int i = 0; i < 2; ++i) push(want, std::hypot(l, h));
        // space diagonals
        for (int i = 0; i < 4; ++i) push(want, std::sqrt(w * w + l * l + h * h));
        CHECK(got == want);
    }
}

TEST_CASE("point-like box projects to a rectangle centered at the principal point") {
    const CameraModel cam = CameraModel::pinhole(500, 320, 180, 640, 360);
    Box3D tiny{0, 0.0005, 20, 0.001, 0.001, 0.001, 0};
    const ProjectedBox pb = project_box(tiny, cam);
    CHECK((pb.u_min + pb.u_max) / 2 == doctest::Approx(320).epsilon(1e-6));
    CHECK((pb.v_min + pb.v_max) / 2 == doctest::Approx(180).epsilon(1e-6));
}

TEST_CASE("translating a box along +x shifts the rectangle right monotonically") {
    const CameraModel cam = CameraModel::pinhole(400, 320, 180, 640, 360);
    double last_umin = -1, last_umax = -1;
    for (double x = -4; x <= 4; x += 0.5) {
        Box3D b{x, 1.5, 25, 1.5, 1.7, 4.0, 0.4};
        const ProjectedBox pb = project_box(b, cam);
        if (last_umin >= 0) {
            CHECK(pb.u_min > last_umin);
            CHECK(pb.u_max > last_umax);
        }
        last_umin = pb.u_min;
        last_umax = pb.u_max;
    }
}

TEST_CASE("projection matches a manual matrix-vector oracle") {
    // independent oracle: direct per-corner multiply by the full 3x4
    const std::array<double, 12> K = {700, 0, 600, 45, 0, 710, 170, -3, 0, 0, 1, 0.002};
    const CameraModel cam = CameraModel::make(K, 1200, 370);
    Box3D b{1.2, 1.4, 17, 1.6, 1.8, 4.1, 0.9};
    const ProjectedBox pb = project_box(b, cam);
    const auto pts = corners(b);
    for (int i = 0; i < 8; ++i) {
        const double u =
            (K[0] * pts[i].x + K[1] * pts[i].y + K[2] * pts[i].z + K[3]) /
            (K[8] * pts[i].x + K[9] * pts[i].y + K[10] * pts[i].z + K[11]);
        const double v =
            (K[4] * pts[i].x + K[5] * pts[i].y + K[6] * pts[i].z + K[7]) /
            (K[8] * pts[i].x + K[9] * pts[i].y + K[10] * pts[i].z + K[11]);
        CHECK(pb.px[i].u == doctest::Approx(u).epsilon(1e-12));
        CHECK(pb.px[i].v == doctest::Approx(v).epsilon(1e-12));
    }
}

TEST_CASE("project_box raises BehindCamera when a corner depth is <= 0") {
    const CameraModel cam = CameraModel::pinhole(400, 320, 180, 640, 360);
    Box3D behind{0, 1.5, -5, 1.5, 1.7, 4.0, 0};
    CHECK_THROWS_AS(project_box(behind, cam), BehindCamera);
    // at theta = pi/2 the length axis runs along world z, so l/2 = 2 > z
    Box3D straddling{0, 1.5, 1.0, 1.5, 1.7, 4.0, M_PI / 2};
    CHECK_THROWS_AS(project_box(straddling, cam), BehindCamera);
}

TEST_CASE("projection consistency: shrinking a box never enlarges its rectangle") {
    std::mt19937_64 rng(11);
    const CameraModel cam = CameraModel::pinhole(400, 320, 180, 640, 360);
    for (int trial = 0; trial < 100; ++trial) {
        Box3D b = random_box(rng);
        b.x *= 0.4;  // keep most of the box well inside the view
        Box3D small = b;
        const Vec3 c = b.center();
        small.h *= 0.9;
        small.w *= 0.9;
        small.l *= 0.9;
        // same 3D center
        small.y = c.y + small.h / 2;
        const ProjectedBox big = project_box(b, cam);
        const ProjectedBox shrunk = project_box(small, cam);
        CHECK(shrunk.u_min >= big.u_min - 1e-9);
        CHECK(shrunk.u_max <= big.u_max + 1e-9);
        CHECK(shrunk.v_min >= big.v_min - 1e-9);
        CHECK(shrunk.v_max <= big.v_max + 1e-9);
    }
}

TEST_CASE("axial_to_world closed forms at theta=0 and theta=pi/2") {
    // theta = 0: width displacement maps to world z, forward to world x
    WorldDisplacement w = axial_to_world({1, 0, 0}, 0);
    CHECK(w.dx == doctest::Approx(0));
    CHECK(w.dy == doctest::Approx(0));
    CHECK(w.dz == doctest::Approx(1));
    w = axial_to_world({0, 0, 1}, 0);
    CHECK(w.dx == doctest::Approx(1));
    CHECK(w.dz == doctest::Approx(0));
    w = axial_to_world({1, 0, 0}, M_PI / 2);
    CHECK(w.dx == doctest::Approx(1));
    CHECK(w.dz == doctest::Approx(0).epsilon(1e-12));
    // height is passed through
    w = axial_to_world({0, -2, 0}, 1.234);
    CHECK(w.dx == doctest::Approx(0));
    CHECK(w.dy == doctest::Approx(-2));
    CHECK(w.dz == doctest::Approx(0));
}

TEST_CASE("world_to_axial closed form at theta=0") {
    const AxialDisplacement a = world_to_axial({0, 0, 1}, 0);
    CHECK(a.dx_a == doctest::Approx(1));
    CHECK(a.dy_a == doctest::Approx(0));
    CHECK(a.dz_a == doctest::Approx(0));
}

TEST_CASE("round-trip world->axial->world at theta=0.7") {
    const WorldDisplacement d{0.3, -0.1, 2.0};
    const WorldDisplacement rt = axial_to_world(world_to_axial(d, 0.7), 0.7);
    CHECK(std::abs(rt.dx - d.dx) < 1e-12);
    CHECK(std::abs(rt.dy - d.dy) < 1e-12);
    CHECK(std::abs(rt.dz - d.dz) < 1e-12);
}

TEST_CASE("round-trip property sweep over 1000 random displacements") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-10, 10), utheta(-M_PI, M_PI);
    double max_err = 0;
    for (int i = 0; i < 1000; ++i) {
        const WorldDisplacement d{u(rng), u(rng), u(rng)};
        const double theta = utheta(rng);
        const WorldDisplacement rt = axial_to_world(world_to_axial(d, theta), theta);
        max_err = std::max({max_err, std::abs(rt.dx - d.dx), std::abs(rt.dy - d.dy),
                            std::abs(rt.dz - d.dz)});
        const AxialDisplacement a{u(rng), u(rng), u(rng)};
        const WorldDisplacement w = axial_to_world(a, theta);
        const AxialDisplacement art = world_to_axial(w, theta);
        max_err = std::max({max_err, std::abs(art.dx_a - a.dx_a),
                            std::abs(art.dy_a - a.dy_a), std::abs(art.dz_a - a.dz_a)});
    }
    CHECK(max_err < 1e-9);
}

TEST_CASE("axial transform is linear and norm-preserving") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-5, 5), utheta(-M_PI, M_PI);
    for (int i = 0; i < 200; ++i) {
        const double theta = utheta(rng);
        const AxialDisplacement a{u(rng), u(rng), u(rng)};
        const AxialDisplacement b{u(rng), u(rng), u(rng)};
        const double s = u(rng);
        const WorldDisplacement wa = axial_to_world(a, theta);
        const WorldDisplacement wb = axial_to_world(b, theta);
        const WorldDisplacement wsum = axial_to_world(
            {a.dx_a + s * b.dx_a, a.dy_a + s * b.dy_a, a.dz_a + s * b.dz_a}, theta);
        CHECK(std::abs(wsum.dx - (wa.dx + s * wb.dx)) < 1e-12);
        CHECK(std::abs(wsum.dy - (wa.dy + s * wb.dy)) < 1e-12);
        CHECK(std::abs(wsum.dz - (wa.dz + s * wb.dz)) < 1e-12);
        const double n_in = std::sqrt(a.dx_a * a.dx_a + a.dy_a * a.dy_a + a.dz_a * a.dz_a);
        const double n_out = std::sqrt(wa.dx * wa.dx + wa.dy * wa.dy + wa.dz * wa.dz);
        CHECK(std::abs(n_in - n_out) < 1e-12);
    }
}

TEST_CASE("iou_bev analytic cases") {
    Box3D a{0, 0, 0, 1, 1, 1, 0};
    CHECK(iou_bev(a, a) == doctest::Approx(1.0));
    Box3D b = a;
    b.x += 0.5;  // footprint length axis is x
    // overlap 0.5, union 1.5
    CHECK(iou_bev(a, b) == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
}

TEST_CASE("iou_bev of a square vs its 45-degree rotation matches sampling") {
    Box3D a{0, 0, 0, 1, 1, 1, 0};
    Box3D b = a;
    b.theta = M_PI / 4;
    const double exact = iou_bev(a, b);
    const double mc = mc_iou_bev(a, b, 1000000, 99);
    CHECK(std::abs(exact - mc) < 0.005);
    // closed form: intersection is a regular octagon, area 8*(sqrt(2)-1)/2
    const double inter = 2 * (std::sqrt(2.0) - 1);
    CHECK(exact == doctest::Approx(inter / (2 - inter)).epsilon(1e-9));
}

TEST_CASE("iou_3d trivial cases") {
    Box3D a{1, 2, 20, 1.5, 1.7, 4.0, 0.3};
    CHECK(iou_3d(a, a) == doctest::Approx(1.0));
    Box3D far = a;
    far.x += 100;
    CHECK(iou_3d(a, far) == 0.0);
}

TEST_CASE("iou_3d matches the Monte-Carlo oracle on random rotated pairs") {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 25; ++trial) {
        const Box3D a = random_box(rng);
        const Box3D b = offset_partner(a, rng);
        const double exact = iou_3d(a, b);
        const double mc = mc_iou_3d(a, b, 1000000, 1000 + trial);
        CHECK(std::abs(exact - mc) < 0.01);
    }
}

TEST_CASE("iou_3d symmetry and bounds") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const Box3D a = random_box(rng);
        const Box3D b = offset_partner(a, rng);
        const double ab = iou_3d(a, b);
        const double ba = iou_3d(b, a);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
    }
}

TEST_CASE("iou_3d equals 1 only for identical non-square-footprint boxes") {
    Box3D a{0, 1, 15, 1.5, 1.7, 4.0, 0.2};
    CHECK(iou_3d(a, a) == doctest::Approx(1.0));
    Box3D nudged = a;
    nudged.x += 1e-3;
    CHECK(iou_3d(a, nudged) < 1.0);
    nudged = a;
    nudged.theta += 1e-3;
    CHECK(iou_3d(a, nudged) < 1.0);
}

TEST_CASE("iou_3d is invariant under rigid ground-plane motion of both boxes") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-5, 5), utheta(-M_PI, M_PI);
    for (int trial = 0; trial < 100; ++trial) {
        const Box3D a = random_box(rng);
        const Box3D b = offset_partner(a, rng);
        const double base = iou_3d(a, b);
        const double tx = u(rng), tz = u(rng), rot = utheta(rng);
        auto moved = [&](const Box3D& s) {
            Box3D m = s;
            const double c = std::cos(rot), sn = std::sin(rot);
            m.x = c * s.x + sn * s.z + tx;
            m.z = -sn * s.x + c * s.z + tz;
            m.theta = wrap_angle(s.theta + rot);
            return m;
        };
        CHECK(std::abs(iou_3d(moved(a), moved(b)) - base) < 1e-9);
    }
}

TEST_CASE("degenerate zero-area intersections return 0") {
    Box3D a{0, 0, 0, 1, 1, 1, 0};
    Box3D touching = a;
    touching.x += 1.0;  // shares exactly one footprint edge
    CHECK(iou_bev(a, touching) == doctest::Approx(0.0));
    Box3D stacked = a;
    stacked.y -= 1.0;  // box spans [y-h, y]; exactly stacked
    CHECK(iou_3d(a, stacked) == doctest::Approx(0.0));
}

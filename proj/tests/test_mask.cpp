#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "boxrefine/mask.hpp"
#include "boxrefine/scene.hpp"
#include "test_util.hpp"

using namespace boxrefine;
using testutil::random_box;

TEST_CASE("depth_modulate branch values") {
    const Rgb blue{0, 0, 255};
    // z = 0: factor 1
    CHECK(depth_modulate(blue, 0) == Rgb{0, 0, 255});
    // z = 50: factor 0.5, 127.5 rounds half-up to 128
    CHECK(depth_modulate(blue, 50) == Rgb{0, 0, 128});
    // z = 60: factor 128/255 exactly
    CHECK(depth_modulate(blue, 60) == Rgb{0, 0, 128});
    CHECK(depth_modulate({255, 255, 255}, 25) == Rgb{191, 191, 191});
    CHECK_THROWS_AS(depth_modulate(blue, -0.001), NegativeDepth);
}

TEST_CASE("depth_modulate is monotone non-increasing for z <= 50") {
    const Rgb c{200, 140, 90};
    Rgb prev = depth_modulate(c, 0);
    for (double z = 1; z <= 50; z += 1) {
        const Rgb cur = depth_modulate(c, z);
        CHECK(cur.r <= prev.r);
        CHECK(cur.g <= prev.g);
        CHECK(cur.b <= prev.b);
        prev = cur;
    }
}

TEST_CASE("face_visibility for a frontal box") {
    // theta = +pi/2 points the front face (+length axis) toward the camera
    Box3D box{0, 1.5, 20, 1.5, 1.7, 4.0, M_PI / 2};
    const auto vis = face_visibility(box);
    CHECK(vis[int(Face::Front)]);
    CHECK_FALSE(vis[int(Face::Back)]);
}

TEST_CASE("visible face count is between 1 and 3") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 300; ++trial) {
        const Box3D b = random_box(rng);
        const auto vis = face_visibility(b);
        int n = 0;
        for (bool v : vis) n += v;
        CHECK(n >= 1);
        CHECK(n <= 3);
    }
}

TEST_CASE("face_visibility matches an independent normal-based oracle") {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 300; ++trial) {
        const Box3D b = random_box(rng);
        const auto vis = face_visibility(b);
        const auto pts = corners(b);
        const Vec3 c = b.center();
        for (int f = 0; f < 6; ++f) {
            // outward normal from the face's corner geometry
            const auto& idx = kFaceCorners[f];
            const Vec3& p0 = pts[idx[0]];
            const Vec3& p1 = pts[idx[1]];
            const Vec3& p2 = pts[idx[2]];
            Vec3 e1{p1.x - p0.x, p1.y - p0.y, p1.z - p0.z};
            Vec3 e2{p2.x - p0.x, p2.y - p0.y, p2.z - p0.z};
            Vec3 n{e1.y * e2.z - e1.z * e2.y, e1.z * e2.x - e1.x * e2.z,
                   e1.x * e2.y - e1.y * e2.x};
            Vec3 fc{(p0.x + p2.x) / 2, (p0.y + p2.y) / 2, (p0.z + p2.z) / 2};
            const double outward = n.x * (fc.x - c.x) + n.y * (fc.y - c.y) + n.z * (fc.z - c.z);
            if (outward < 0) {
                n.x = -n.x;
                n.y = -n.y;
                n.z = -n.z;
            }
            const bool expect = n.x * (0 - c.x) + n.y * (0 - c.y) + n.z * (0 - c.z) > 0;
            CHECK(vis[f] == expect);
        }
    }
}

TEST_CASE("face_visibility rejects a box centered at the camera") {
    Box3D degenerate{0, 0.5, 0, 1, 1, 1, 0};  // center exactly at origin
    CHECK_THROWS_AS(face_visibility(degenerate), DegenerateGeometry);
}

TEST_CASE("scanline fill matches a brute-force point-in-polygon oracle") {
    std::mt19937_64 rng(47);
    std::uniform_real_distribution<double> uc(12, 28), us(-9, 9);
    for (int trial = 0; trial < 200; ++trial) {
        // random convex quad: affine image of the unit square
        const double cx = uc(rng), cy = uc(rng);
        double a11 = us(rng), a12 = us(rng), a21 = us(rng), a22 = us(rng);
        if (std::abs(a11 * a22 - a12 * a21) < 4) {
            --trial;
            continue;
        }
        const double sq[4][2] = {{-1, -1}, {1, -1}, {1, 1}, {-1, 1}};
        std::array<Pt2, 4> q;
        for (int i = 0; i < 4; ++i)
            q[i] = {cx + a11 * sq[i][0] + a12 * sq[i][1],
                    cy + a21 * sq[i][0] + a22 * sq[i][1]};
        // normalize winding to CCW for the half-plane oracle
        const double area2 = (q[1].x - q[0].x) * (q[2].y - q[0].y) -
                             (q[1].y - q[0].y) * (q[2].x - q[0].x);
        if (area2 < 0) std::swap(q[1], q[3]);
        Image img = Image::filled(40, 40, {255, 255, 255});
        fill_convex(img, q, {10, 20, 30});
        // oracle: pixel center inside all four half-planes (CCW winding)
        for (int y = 0; y < 40; ++y) {
            for (int x = 0; x < 40; ++x) {
                const double px = x + 0.5, py = y + 0.5;
                bool inside = true;
                for (int e = 0; e < 4; ++e) {
                    const Pt2& a = q[e];
                    const Pt2& b = q[(e + 1) % 4];
                    if ((b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x) < 0) {
                        inside = false;
                        break;
                    }
                }
                CAPTURE(trial);
                CHECK((img.get(x, y) == Rgb{10, 20, 30}) == inside);
            }
        }
    }
}

TEST_CASE("render_mask of a box fully outside the crop is all white") {
    const CameraModel cam = CameraModel::pinhole(320, 320, 180, 640, 360);
    Box3D box{6, 1.5, 12, 1.5, 1.7, 4.0, 0.4};  // projects far right of center
    const CropRect rect{0, 0, 60, 60};           // top-left corner, box not there
    const Image mask = render_mask(box, cam, FacePalette::defaults(), rect, 64);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x) CHECK(mask.get(x, y) == Rgb{255, 255, 255});
}

TEST_CASE("render_mask is deterministic and darkens with depth") {
    const CameraModel cam = CameraModel::pinhole(320, 320, 180, 640, 360);
    Box3D near{0, 1.5, 20, 1.5, 1.7, 4.0, 0.6};
    const ProjectedBox pb = project_box(near, cam);
    const CropRect rect = state_crop_rect(pb, cam);
    const FacePalette pal = FacePalette::defaults();
    const Image a = render_mask(near, cam, pal, rect, 64);
    const Image b = render_mask(near, cam, pal, rect, 64);
    CHECK(a == b);

    // same geometry pushed deeper: scale x so the projection stays put
    Box3D deep = near;
    deep.z = 40;
    deep.x = near.x * 2;
    // compare the palette applied at the two depths
    for (int f = 0; f < 6; ++f) {
        const Rgb cn = depth_modulate(pal.face[f], near.z);
        const Rgb cd = depth_modulate(pal.face[f], deep.z);
        CHECK(cd.r <= cn.r);
        CHECK(cd.g <= cn.g);
        CHECK(cd.b <= cn.b);
    }
    // the z=40 render must contain only darker-or-background pixels
    const ProjectedBox pbd = project_box(deep, cam);
    const CropRect rectd = state_crop_rect(pbd, cam);
    const Image deep_img = render_mask(deep, cam, pal, rectd, 64);
    int fg = 0;
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 64; ++x) {
            const Rgb c = deep_img.get(x, y);
            if (c == Rgb{255, 255, 255} || c == Rgb{0, 0, 0}) continue;
            ++fg;
            bool matches_some_face = false;
            for (int f = 0; f < 6; ++f)
                if (c == depth_modulate(pal.face[f], deep.z)) matches_some_face = true;
            CHECK(matches_some_face);
        }
    }
    CHECK(fg > 100);
}

TEST_CASE("painter order: the nearer of two overlapping visible faces wins") {
    // long thin box angled so left and front faces both pass the
    // center-ray visibility test while their projections share pixels
    const CameraModel cam = CameraModel::pinhole(320, 320, 180, 640, 360);
    std::mt19937_64 rng(53);
    int checked = 0;
    for (int trial = 0; trial < 400 && checked < 3; ++trial) {
        const Box3D b = random_box(rng);
        const auto vis = face_visibility(b);
        const ProjectedBox pb = project_box(b, cam);
        const CropRect rect = state_crop_rect(pb, cam);
        if (rect.w < 8 || rect.h < 8) continue;
        const FacePalette pal = FacePalette::defaults();
        const Image mask = render_mask(b, cam, pal, rect, 96);

        // all non-edge foreground pixels must carry the color of a
        // visible face, never a hidden one
        bool any_fg = false;
        for (int y = 0; y < 96; ++y) {
            for (int x = 0; x < 96; ++x) {
                const Rgb c = mask.get(x, y);
                if (c == Rgb{255, 255, 255} || c == Rgb{0, 0, 0}) continue;
                any_fg = true;
                for (int f = 0; f < 6; ++f)
                    if (!vis[f]) CHECK(c != depth_modulate(pal.face[f], b.z));
            }
        }
        if (any_fg) ++checked;
    }
    CHECK(checked == 3);
}

TEST_CASE("build_state clamps the crop and always outputs SxS") {
    const CameraModel cam = CameraModel::pinhole(320, 320, 180, 640, 360);
    const Image scene = Image::filled(640, 360, {90, 90, 90});
    // near box whose enlarged projection exceeds the image borders
    Box3D big{0.5, 1.6, 5.5, 1.5, 1.7, 4.0, 0.4};
    RenderConfig cfg;
    cfg.state_size = 48;
    const StateImage st = build_state(big, scene, cam, cfg);
    CHECK(st.patch.width == 48);
    CHECK(st.patch.height == 48);
    CHECK(st.mask.width == 48);
    CHECK(st.crop.x >= 0);
    CHECK(st.crop.y >= 0);
    CHECK(st.crop.x + st.crop.w <= 640 + 1e-9);
    CHECK(st.crop.y + st.crop.h <= 360 + 1e-9);
}

TEST_CASE("build_state is bit-deterministic and registers both patch groups") {
    const Scene scene = generate_scene(7);
    RenderConfig cfg;
    cfg.state_size = 32;
    const StateImage a = build_state(scene.objects[0], scene.image, scene.camera, cfg);
    const StateImage b = build_state(scene.objects[0], scene.image, scene.camera, cfg);
    CHECK(a.patch == b.patch);
    CHECK(a.mask == b.mask);
    CHECK(a.crop == b.crop);
}

TEST_CASE("build_state raises EmptyCrop when the projection misses the image") {
    const CameraModel cam = CameraModel::pinhole(320, 320, 180, 640, 360);
    const Image scene = Image::filled(640, 360, {90, 90, 90});
    Box3D off{40, 1.5, 12, 1.5, 1.7, 4.0, 0};  // far off to the right
    RenderConfig cfg;
    CHECK_THROWS_AS(build_state(off, scene, cam, cfg), EmptyCrop);
}

TEST_CASE("direct projection mode overlays the wireframe on the image patch") {
    const Scene scene = generate_scene(11);
    RenderConfig pa;
    pa.state_size = 64;
    RenderConfig dp = pa;
    dp.mode = MaskMode::DirectProjection;
    const Box3D& gt = scene.objects[0];
    const StateImage spa = build_state(gt, scene.image, scene.camera, pa);
    const StateImage sdp = build_state(gt, scene.image, scene.camera, dp);
    CHECK(spa.patch == sdp.patch);
    // the direct mask differs from the patch only where edges were drawn
    int black_only = 0, diffs = 0;
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 64; ++x) {
            if (sdp.mask.get(x, y) == sdp.patch.get(x, y)) continue;
            ++diffs;
            if (sdp.mask.get(x, y) == Rgb{0, 0, 0}) ++black_only;
        }
    }
    CHECK(diffs > 0);
    CHECK(black_only == diffs);
}

TEST_CASE("mask foreground overlaps the rendered object silhouette") {
    SceneParams params;
    params.min_objects = 1;
    params.max_objects = 1;
    params.z_max = 30;
    const Scene scene = generate_scene(19, params);
    RenderConfig cfg;
    cfg.state_size = 64;
    const Box3D& gt = scene.objects[0];
    const StateImage st = build_state(gt, scene.image, scene.camera, cfg);
    auto is_mask_fg = [&](int x, int y) {
        const Rgb c = st.mask.get(x, y);
        return !(c == Rgb{255, 255, 255});
    };
    auto is_object = [&](int x, int y) {
        const Rgb c = st.patch.get(x, y);
        const Rgb bg = scene.image.get(0, 0);
        const int d = std::abs(c.r - bg.r) + std::abs(c.g - bg.g) + std::abs(c.b - bg.b);
        return d > 60;
    };
    int inter = 0, uni = 0;
    for (int y = 0; y < 64; ++y) {
        for (int x = 0; x < 64; ++x) {
            const bool m = is_mask_fg(x, y);
            const bool o = is_object(x, y);
            inter += m && o;
            uni += m || o;
        }
    }
    REQUIRE(uni > 0);
    CHECK(double(inter) / uni > 0.5);
}

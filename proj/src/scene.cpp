#include "boxrefine/scene.hpp"

#include <algorithm>
#include <cmath>

#include "boxrefine/mask.hpp"

namespace boxrefine {

bool projects_inside(const Box3D& box, const CameraModel& cam) {
    try {
        const ProjectedBox pb = project_box(box, cam);
        for (const PixelPoint& p : pb.px) {
            if (p.u < 0 || p.u > cam.image_width || p.v < 0 || p.v > cam.image_height)
                return false;
        }
        return true;
    } catch (const BehindCamera&) {
        return false;
    }
}

namespace {

// Body colors kept away from the pure palette hues used by the mask.
constexpr std::array<Rgb, 6> kBodyColors = {{
    {178, 82, 52},
    {66, 130, 170},
    {150, 146, 68},
    {108, 84, 150},
    {88, 150, 96},
    {168, 112, 140},
}};

// Fixed per-face brightness so the cuboid reads as a lit solid.
constexpr std::array<double, 6> kFaceShade = {1.0, 0.55, 0.85, 0.7, 0.95, 0.4};

void render_object(Image& img, const Box3D& box, const CameraModel& cam, Rgb body) {
    const ProjectedBox pb = project_box(box, cam);
    const auto vis = face_visibility(box);
    std::array<int, 6> order = {0, 1, 2, 3, 4, 5};
    std::array<double, 6> fdepth;
    for (int f = 0; f < 6; ++f) fdepth[f] = face_center(box, Face(f)).z;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return fdepth[a] > fdepth[b]; });
    for (int f : order) {
        if (!vis[f]) continue;
        const double shade = kFaceShade[f];
        const Rgb base{uint8_t(std::lround(body.r * shade)),
                       uint8_t(std::lround(body.g * shade)),
                       uint8_t(std::lround(body.b * shade))};
        const Rgb color = depth_modulate(base, box.z);
        std::array<Pt2, 4> quad;
        for (int i = 0; i < 4; ++i) {
            const PixelPoint& p = pb.px[kFaceCorners[f][i]];
            quad[i] = {p.u, p.v};
        }
        fill_convex(img, quad, color);
    }
}

}  // namespace

Scene generate_scene(uint64_t seed, const SceneParams& params) {
    std::mt19937_64 rng(seed);
    Scene scene;
    scene.camera = CameraModel::pinhole(params.focal, params.image_width / 2.0,
                                        params.image_height / 2.0, params.image_width,
                                        params.image_height);

    std::uniform_int_distribution<int> count(params.min_objects, params.max_objects);
    std::uniform_real_distribution<double> uz(params.z_min, params.z_max);
    std::uniform_real_distribution<double> utheta(-M_PI, M_PI);
    std::normal_distribution<double> nh(1.5, 0.08), nw(1.7, 0.08), nl(4.0, 0.25);
    std::uniform_real_distribution<double> u01(0, 1);

    const int wanted = count(rng);
    int attempts = 0;
    while (int(scene.objects.size()) < wanted) {
        if (++attempts > params.max_retries * params.max_objects) throw PlacementFailure{};
        Box3D box;
        box.z = uz(rng);
        // lateral range scales with depth so the whole box can fit
        const double half_span = 0.8 * box.z * (params.image_width / 2.0) / params.focal;
        box.x = (2 * u01(rng) - 1) * std::max(0.0, half_span - 3.0);
        box.y = params.ground_y;
        box.h = std::max(1.0, nh(rng));
        box.w = std::max(1.2, nw(rng));
        box.l = std::max(2.5, nl(rng));
        box.theta = wrap_angle(utheta(rng));
        if (!projects_inside(box, scene.camera)) continue;
        bool overlaps = false;
        for (const Box3D& other : scene.objects) {
            if (iou_3d(box, other) > 0 || std::hypot(box.x - other.x, box.z - other.z) < 4.0) {
                overlaps = true;
                break;
            }
        }
        if (overlaps) continue;
        scene.objects.push_back(box);
    }

    scene.image = Image::filled(params.image_width, params.image_height, params.background);
    // painter order across objects: far to near
    std::vector<int> order(scene.objects.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = int(i);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return scene.objects[a].z > scene.objects[b].z;
    });
    for (int i : order) {
        render_object(scene.image, scene.objects[i], scene.camera,
                      kBodyColors[i % kBodyColors.size()]);
    }
    return scene;
}

std::vector<Box3D> jitter(const Box3D& gt, const JitterSpec& spec, const CameraModel& cam,
                          std::mt19937_64& rng) {
    std::vector<Box3D> out;
    out.reserve(spec.samples_per_object);
    std::normal_distribution<double> gauss(0.0, 1.0);
    long attempts = 0;
    const long limit = 100L * spec.samples_per_object;
    while (int(out.size()) < spec.samples_per_object) {
        if (++attempts > limit) throw RejectionOverflow{};
        Box3D b = gt;
        b.x += spec.sigma[0] * gauss(rng);
        b.y += spec.sigma[1] * gauss(rng);
        b.z += spec.sigma[2] * gauss(rng);
        b.h += spec.sigma[3] * gauss(rng);
        b.w += spec.sigma[4] * gauss(rng);
        b.l += spec.sigma[5] * gauss(rng);
        b.theta = wrap_angle(b.theta + spec.sigma[6] * gauss(rng));
        if (b.h <= 0.1 || b.w <= 0.1 || b.l <= 0.1) continue;
        if (!projects_inside(b, cam)) continue;
        out.push_back(b);
    }
    return out;
}

}  // namespace boxrefine

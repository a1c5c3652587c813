#include "boxrefine/mask.hpp"

#include <algorithm>
#include <cmath>

namespace boxrefine {

Rgb depth_modulate(Rgb c, double z) {
    if (z < 0) throw NegativeDepth{};
    const double factor = z > 50 ? 128.0 / 255.0 : 1.0 - z / 100.0;
    auto scale = [&](uint8_t v) {
        const double out = std::floor(v * factor + 0.5);  // half-up
        return uint8_t(std::clamp(out, 0.0, 255.0));
    };
    return {scale(c.r), scale(c.g), scale(c.b)};
}

Vec3 face_center(const Box3D& box, Face f) {
    const auto pts = corners(box);
    const auto& idx = kFaceCorners[int(f)];
    Vec3 c;
    for (int i : idx) {
        c.x += pts[i].x / 4;
        c.y += pts[i].y / 4;
        c.z += pts[i].z / 4;
    }
    return c;
}

std::array<bool, 6> face_visibility(const Box3D& box) {
    const Vec3 c = box.center();
    const double norm = std::sqrt(c.x * c.x + c.y * c.y + c.z * c.z);
    if (norm < 1e-6) throw DegenerateGeometry{};
    std::array<bool, 6> vis{};
    for (int f = 0; f < 6; ++f) {
        const Vec3 fc = face_center(box, Face(f));
        const double dot = (0 - c.x) * (fc.x - c.x) + (0 - c.y) * (fc.y - c.y) +
                           (0 - c.z) * (fc.z - c.z);
        vis[f] = dot > 0;
    }
    return vis;
}

namespace {

// Crop-to-output pixel mapping shared by all overlay drawing.
Pt2 to_output(const PixelPoint& p, const CropRect& rect, int out_size) {
    return {(p.u - rect.x) * out_size / rect.w,
            (p.v - rect.y) * out_size / rect.h};
}

void draw_wireframe(Image& out, const ProjectedBox& pb, const CropRect& rect) {
    for (const auto& e : kBoxEdges) {
        draw_line(out, to_output(pb.px[e[0]], rect, out.width),
                  to_output(pb.px[e[1]], rect, out.width), {0, 0, 0});
    }
}

}  // namespace

Image render_mask(const Box3D& box, const CameraModel& cam, const FacePalette& palette,
                  const CropRect& rect, int out_size) {
    const ProjectedBox pb = project_box(box, cam);
    const auto vis = face_visibility(box);

    // paint order: farthest face center first
    std::array<int, 6> order = {0, 1, 2, 3, 4, 5};
    std::array<double, 6> fdepth;
    for (int f = 0; f < 6; ++f) fdepth[f] = face_center(box, Face(f)).z;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return fdepth[a] > fdepth[b]; });

    Image canvas = Image::filled(cam.image_width, cam.image_height, {255, 255, 255});
    for (int f : order) {
        if (!vis[f]) continue;
        const Rgb color = depth_modulate(palette.face[f], box.z);
        std::array<Pt2, 4> quad;
        for (int i = 0; i < 4; ++i) {
            const PixelPoint& p = pb.px[kFaceCorners[f][i]];
            quad[i] = {p.u, p.v};
        }
        fill_convex(canvas, quad, color);
    }

    Image out = crop_resize_nearest(canvas, rect, out_size);
    draw_wireframe(out, pb, rect);
    return out;
}

CropRect state_crop_rect(const ProjectedBox& pb, const CameraModel& cam) {
    const double cx = (pb.u_min + pb.u_max) / 2;
    const double cy = (pb.v_min + pb.v_max) / 2;
    const double w = (pb.u_max - pb.u_min) * 1.2;
    const double h = (pb.v_max - pb.v_min) * 1.2;
    const double x0 = std::clamp(cx - w / 2, 0.0, double(cam.image_width));
    const double x1 = std::clamp(cx + w / 2, 0.0, double(cam.image_width));
    const double y0 = std::clamp(cy - h / 2, 0.0, double(cam.image_height));
    const double y1 = std::clamp(cy + h / 2, 0.0, double(cam.image_height));
    return {x0, y0, x1 - x0, y1 - y0};
}

StateImage build_state(const Box3D& box, const Image& image, const CameraModel& cam,
                       const RenderConfig& cfg) {
    const ProjectedBox pb = project_box(box, cam);
    const CropRect rect = state_crop_rect(pb, cam);
    if (rect.w <= 0 || rect.h <= 0) throw EmptyCrop{};

    StateImage st;
    st.size = cfg.state_size;
    st.crop = rect;
    st.patch = crop_resize_bilinear(image, rect, cfg.state_size);
    if (cfg.mode == MaskMode::ParameterAware) {
        st.mask = render_mask(box, cam, cfg.palette, rect, cfg.state_size);
    } else {
        st.mask = st.patch;
        draw_wireframe(st.mask, pb, rect);
    }
    return st;
}

}  // namespace boxrefine

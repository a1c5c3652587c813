#pragma once

#include <array>
#include <stdexcept>

#include "boxrefine/geometry.hpp"
#include "boxrefine/image.hpp"

namespace boxrefine {

struct NegativeDepth : std::runtime_error {
    NegativeDepth() : std::runtime_error("instance depth must be >= 0") {}
};

struct DegenerateGeometry : std::runtime_error {
    DegenerateGeometry() : std::runtime_error("box center too close to the camera origin") {}
};

struct EmptyCrop : std::runtime_error {
    EmptyCrop() : std::runtime_error("crop rectangle has zero area") {}
};

enum class Face : int { Front = 0, Back, Left, Right, Top, Bottom };

// Corner indices per face, using the corners() ordering.
inline constexpr std::array<std::array<int, 4>, 6> kFaceCorners = {{
    {0, 1, 5, 4},  // front  (+l/2)
    {2, 3, 7, 6},  // back   (-l/2)
    {3, 0, 4, 7},  // left   (+w/2)
    {1, 2, 6, 5},  // right  (-w/2)
    {4, 5, 6, 7},  // top    (y = -h)
    {0, 1, 2, 3},  // bottom (y = 0)
}};

inline constexpr std::array<std::array<int, 2>, 12> kBoxEdges = {{
    {0, 1}, {1, 2}, {2, 3}, {3, 0},  // bottom ring
    {4, 5}, {5, 6}, {6, 7}, {7, 4},  // top ring
    {0, 4}, {1, 5}, {2, 6}, {3, 7},  // verticals
}};

// One fixed base color per face; the front face is blue so the
// forward-backward axis is directly readable from the mask.
struct FacePalette {
    std::array<Rgb, 6> face;

    static FacePalette defaults() {
        return {{{
            {0, 0, 255},    // front
            {255, 0, 0},    // back
            {0, 255, 0},    // left
            {255, 255, 0},  // right
            {255, 0, 255},  // top
            {0, 255, 255},  // bottom
        }}};
    }
};

// Scales a base color by the instance depth:
//   z > 50:  c * 128/255
//   z <= 50: c * (1 - z/100)
// rounded half-up and clamped to [0, 255]. Throws NegativeDepth for z < 0.
Rgb depth_modulate(Rgb c, double z);

// Center of a face in camera coordinates.
Vec3 face_center(const Box3D& box, Face f);

// A face is visible when (0 - C) . (C_i - C) > 0, with C the box center
// and C_i the face center. At most 3 faces pass. Throws
// DegenerateGeometry when the center is at the camera origin.
std::array<bool, 6> face_visibility(const Box3D& box);

// White background; visible faces filled back-to-front with
// depth-modulated palette colors; all 12 projected edges drawn black at
// 1 pixel after cropping to `rect` and resizing to out_size.
Image render_mask(const Box3D& box, const CameraModel& cam, const FacePalette& palette,
                  const CropRect& rect, int out_size);

enum class MaskMode { ParameterAware, DirectProjection };

struct RenderConfig {
    int state_size = 64;
    MaskMode mode = MaskMode::ParameterAware;
    FacePalette palette = FacePalette::defaults();
};

// The 6-channel MDP observation: RGB image patch plus RGB mask patch,
// both cut from the same crop rectangle.
struct StateImage {
    int size = 0;
    Image patch;
    Image mask;
    CropRect crop;
};

// Projected rectangle enlarged by 1.2 about its center, clamped to the
// image.
CropRect state_crop_rect(const ProjectedBox& pb, const CameraModel& cam);

// Builds the state. In ParameterAware mode the mask channels hold
// render_mask; in DirectProjection mode they hold a copy of the image
// patch with only the wireframe drawn on top. Throws EmptyCrop when the
// clamped crop has zero area; propagates BehindCamera.
StateImage build_state(const Box3D& box, const Image& image, const CameraModel& cam,
                       const RenderConfig& cfg);

}  // namespace boxrefine

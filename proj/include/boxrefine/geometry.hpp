#pragma once

#include <array>
#include <stdexcept>

namespace boxrefine {

struct BehindCamera : std::runtime_error {
    BehindCamera() : std::runtime_error("box has a corner with non-positive depth") {}
};

// Wrap an angle to [-pi, pi).
double wrap_angle(double theta);

struct Vec3 {
    double x = 0, y = 0, z = 0;
};

// Oriented 3D box in camera coordinates (x right, y down, z forward).
// (x, y, z) is the bottom-center of the box; theta is the yaw about the
// Y axis, stored normalized to [-pi, pi). At theta = 0 the length axis
// runs along world x and the width axis along world z.
struct Box3D {
    double x = 0, y = 0, z = 0;
    double h = 1, w = 1, l = 1;
    double theta = 0;

    void normalize() { theta = wrap_angle(theta); }
    Vec3 center() const { return {x, y - h / 2, z}; }
    double volume() const { return h * w * l; }
};

// The 8 corners of the yaw-rotated cuboid. Order: bottom face first,
// counter-clockwise when viewed from above (-y), then the top face in
// the same plan order. Local offsets before rotation:
//   0: (+l/2, 0, +w/2)  1: (+l/2, 0, -w/2)  2: (-l/2, 0, -w/2)  3: (-l/2, 0, +w/2)
//   4..7: same x/z with y = -h.
std::array<Vec3, 8> corners(const Box3D& box);

// 3x4 intrinsic projection matrix (row-major, pixels) plus image size.
struct CameraModel {
    std::array<double, 12> K{};
    int image_width = 0;
    int image_height = 0;

    // Normalizes so that K[2][2] == 1.
    static CameraModel make(const std::array<double, 12>& k, int width, int height);
    static CameraModel pinhole(double focal, double cu, double cv, int width, int height);
};

struct PixelPoint {
    double u = 0, v = 0;
};

struct ProjectedBox {
    std::array<PixelPoint, 8> px;   // unclamped per-corner pixels
    std::array<double, 8> depth;    // projective depth per corner
    double u_min = 0, v_min = 0, u_max = 0, v_max = 0;  // clamped to image
};

// Projects all 8 corners and returns their axis-aligned bounding
// rectangle clamped to the image. Throws BehindCamera if any corner
// has depth <= 0.
ProjectedBox project_box(const Box3D& box, const CameraModel& cam);

// Displacement along the object's width (x'), height (y') and
// forward/length (z') axes, in meters.
struct AxialDisplacement {
    double dx_a = 0, dy_a = 0, dz_a = 0;
};

struct WorldDisplacement {
    double dx = 0, dy = 0, dz = 0;
};

// dx = dz'*cos(theta) + dx'*sin(theta)
// dy = dy'
// dz = dz'*(-sin(theta)) + dx'*cos(theta)
WorldDisplacement axial_to_world(const AxialDisplacement& d, double theta);

// Exact inverse of axial_to_world at the same theta.
AxialDisplacement world_to_axial(const WorldDisplacement& d, double theta);

// Ground-plane (x, z) footprint corners, plan order as corners() 0..3.
std::array<std::array<double, 2>, 4> footprint(const Box3D& box);

// Area of the intersection of the two yaw-rotated footprints, by convex
// polygon clipping.
double footprint_intersection_area(const Box3D& a, const Box3D& b);

// Bird's-eye-view IoU of the two footprints.
double iou_bev(const Box3D& a, const Box3D& b);

// Volumetric IoU; exact for yaw-only boxes since the vertical extent is
// axis-aligned.
double iou_3d(const Box3D& a, const Box3D& b);

}  // namespace boxrefine

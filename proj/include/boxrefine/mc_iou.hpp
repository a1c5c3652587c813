#pragma once

#include <cstdint>

#include "boxrefine/geometry.hpp"

namespace boxrefine {

// Monte-Carlo IoU estimators. These deliberately avoid the polygon
// clipping path: membership is decided per sample point by rotating it
// into each box's local frame. They serve as an independent check of
// iou_bev / iou_3d.

// Point-in-footprint test in the ground plane.
bool point_in_footprint(double px, double pz, const Box3D& box);

// Full 3D membership test.
bool point_in_box(double px, double py, double pz, const Box3D& box);

double mc_iou_bev(const Box3D& a, const Box3D& b, int samples, uint64_t seed);
double mc_iou_3d(const Box3D& a, const Box3D& b, int samples, uint64_t seed);

}  // namespace boxrefine

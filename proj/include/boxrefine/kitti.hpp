#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "boxrefine/geometry.hpp"
#include "boxrefine/scene.hpp"

namespace boxrefine {

struct ParseError : std::runtime_error {
    int line;
    ParseError(int line_, const std::string& why)
        : std::runtime_error("line " + std::to_string(line_) + ": " + why), line(line_) {}
};

struct MissingCalibration : std::runtime_error {
    MissingCalibration() : std::runtime_error("no P2 projection matrix in calibration") {}
};

// One row of a KITTI object file. Non-Car rows keep only their raw text
// so they can be passed through untouched.
struct KittiRow {
    std::string raw;
    std::string type;
    std::optional<Box3D> car;       // set for Car rows
    std::optional<double> score;    // 16th field when present
    double truncated = 0, occluded = 0, alpha = 0;
    double bbox[4] = {0, 0, 0, 0};
};

// Parses the 15/16-field object format. Car rows yield a Box3D
// (location = bottom-center, yaw = rotation_y); all other types are
// retained raw. Malformed rows raise ParseError with the line number.
std::vector<KittiRow> parse_kitti_rows(const std::string& text);

// P2-style 3x4 projection matrix from a calibration file. Accepts
// either a "P2: <12 floats>" line or a bare 12-float line.
std::array<double, 12> parse_kitti_calib(const std::string& text);

// Two-decimal KITTI formatting.
std::string format_kitti_row(const KittiRow& row);
std::string format_kitti_box(const std::string& type, const Box3D& box,
                             const double bbox[4], std::optional<double> score);

// Scene fragment: Car ground truth plus camera. Image pixels are not
// part of the label format and stay empty.
Scene load_kitti_scene(const std::string& label_text, const std::string& calib_text,
                       int image_width, int image_height);

// Reads a detections file in the same format into scene.detections.
void load_kitti_detections(Scene& scene, const std::string& text, const std::string& tag);

}  // namespace boxrefine

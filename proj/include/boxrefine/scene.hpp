#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "boxrefine/geometry.hpp"
#include "boxrefine/image.hpp"

namespace boxrefine {

struct PlacementFailure : std::runtime_error {
    PlacementFailure() : std::runtime_error("could not place non-overlapping boxes") {}
};

struct RejectionOverflow : std::runtime_error {
    RejectionOverflow()
        : std::runtime_error("jitter acceptance rate below 1%; spec incompatible") {}
};

struct Detection {
    Box3D box;
    std::string source;
    std::optional<double> score;
};

struct Scene {
    CameraModel camera;
    Image image;
    std::vector<Box3D> objects;        // ground truth
    std::vector<Detection> detections; // external estimates to refine
};

struct SceneParams {
    int image_width = 640;
    int image_height = 360;
    double focal = 320;
    double z_min = 5, z_max = 60;
    int min_objects = 1, max_objects = 3;
    double ground_y = 1.5;
    int max_retries = 200;
    Rgb background = {96, 120, 144};
};

// Deterministic synthetic scene: car-scale boxes rendered as solid
// shaded cuboids on a flat background. All ground-truth boxes project
// fully inside the image and have pairwise zero 3D-IoU.
Scene generate_scene(uint64_t seed, const SceneParams& params = {});

// True when every projected corner lies inside the image and all depths
// are positive.
bool projects_inside(const Box3D& box, const CameraModel& cam);

struct JitterSpec {
    // standard deviations for (x, y, z, h, w, l, theta)
    std::array<double, 7> sigma = {0.5, 0.2, 1.0, 0.1, 0.1, 0.1, 0.2};
    int samples_per_object = 300;
};

// Gaussian perturbations of a ground-truth box; samples whose
// projection leaves the image (or goes behind the camera) are redrawn.
// Throws RejectionOverflow when fewer than 1% of draws are accepted.
std::vector<Box3D> jitter(const Box3D& gt, const JitterSpec& spec, const CameraModel& cam,
                          std::mt19937_64& rng);

}  // namespace boxrefine

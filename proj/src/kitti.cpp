#include "boxrefine/kitti.hpp"

#include <cstdio>
#include <sstream>

namespace boxrefine {

std::vector<KittiRow> parse_kitti_rows(const std::string& text) {
    std::vector<KittiRow> rows;
    std::istringstream stream(text);
    std::string line;
    int lineno = 0;
    while (std::getline(stream, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        std::istringstream ls(line);
        std::vector<std::string> fields;
        std::string tok;
        while (ls >> tok) fields.push_back(tok);

        KittiRow row;
        row.raw = line;
        row.type = fields[0];
        if (fields.size() < 15)
            throw ParseError(lineno, "expected at least 15 fields, got " +
                                         std::to_string(fields.size()));
        try {
            row.truncated = std::stod(fields[1]);
            row.occluded = std::stod(fields[2]);
            row.alpha = std::stod(fields[3]);
            for (int i = 0; i < 4; ++i) row.bbox[i] = std::stod(fields[4 + i]);
            if (row.type == "Car") {
                Box3D box;
                box.h = std::stod(fields[8]);
                box.w = std::stod(fields[9]);
                box.l = std::stod(fields[10]);
                box.x = std::stod(fields[11]);
                box.y = std::stod(fields[12]);
                box.z = std::stod(fields[13]);
                box.theta = wrap_angle(std::stod(fields[14]));
                row.car = box;
            }
            if (fields.size() >= 16) row.score = std::stod(fields[15]);
        } catch (const std::invalid_argument&) {
            throw ParseError(lineno, "non-numeric field");
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::array<double, 12> parse_kitti_calib(const std::string& text) {
    std::istringstream stream(text);
    std::string line;
    std::optional<std::array<double, 12>> bare;
    while (std::getline(stream, line)) {
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) continue;
        std::array<double, 12> k{};
        if (first == "P2:" || first == "P2") {
            for (double& v : k)
                if (!(ls >> v)) throw MissingCalibration{};
            return k;
        }
        // a bare 12-float line also qualifies
        std::istringstream all(line);
        int n = 0;
        double v;
        std::array<double, 12> vals{};
        while (all >> v && n < 12) vals[n++] = v;
        if (n == 12 && !(all >> v) && !bare) bare = vals;
    }
    if (bare) return *bare;
    throw MissingCalibration{};
}

std::string format_kitti_box(const std::string& type, const Box3D& box,
                             const double bbox[4], std::optional<double> score) {
    char buf[256];
    int n = std::snprintf(buf, sizeof(buf),
                          "%s 0.00 0 0.00 %.2f %.2f %.2f %.2f "
                          "%.2f %.2f %.2f %.2f %.2f %.2f %.2f",
                          type.c_str(), bbox[0], bbox[1], bbox[2], bbox[3], box.h, box.w,
                          box.l, box.x, box.y, box.z, box.theta);
    if (score) n += std::snprintf(buf + n, sizeof(buf) - n, " %.2f", *score);
    return std::string(buf, n);
}

std::string format_kitti_row(const KittiRow& row) {
    if (!row.car) return row.raw;
    char buf[256];
    int n = std::snprintf(buf, sizeof(buf),
                          "%s %.2f %.0f %.2f %.2f %.2f %.2f %.2f "
                          "%.2f %.2f %.2f %.2f %.2f %.2f %.2f",
                          row.type.c_str(), row.truncated, row.occluded, row.alpha,
                          row.bbox[0], row.bbox[1], row.bbox[2], row.bbox[3], row.car->h,
                          row.car->w, row.car->l, row.car->x, row.car->y, row.car->z,
                          row.car->theta);
    if (row.score) n += std::snprintf(buf + n, sizeof(buf) - n, " %.2f", *row.score);
    return std::string(buf, n);
}

Scene load_kitti_scene(const std::string& label_text, const std::string& calib_text,
                       int image_width, int image_height) {
    Scene scene;
    scene.camera = CameraModel::make(parse_kitti_calib(calib_text), image_width, image_height);
    for (const KittiRow& row : parse_kitti_rows(label_text)) {
        if (row.car) scene.objects.push_back(*row.car);
    }
    return scene;
}

void load_kitti_detections(Scene& scene, const std::string& text, const std::string& tag) {
    for (const KittiRow& row : parse_kitti_rows(text)) {
        if (row.car) scene.detections.push_back({*row.car, tag, row.score});
    }
}

}  // namespace boxrefine

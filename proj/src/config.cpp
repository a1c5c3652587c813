#include "boxrefine/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace boxrefine {

using nlohmann::json;

RunConfig RunConfig::desk() {
    RunConfig cfg;
    cfg.render.state_size = 32;
    cfg.train.rl_iterations = 5000;
    return cfg;
}

namespace {

std::string mode_name(MaskMode m) {
    return m == MaskMode::ParameterAware ? "parameter_aware" : "direct_projection";
}

MaskMode mode_from(const std::string& s) {
    if (s == "parameter_aware") return MaskMode::ParameterAware;
    if (s == "direct_projection") return MaskMode::DirectProjection;
    throw ConfigError("render.mode: unknown value '" + s + "'");
}

std::string frame_name(ActionFrame f) {
    return f == ActionFrame::Axial ? "axial" : "world";
}

ActionFrame frame_from(const std::string& s) {
    if (s == "axial") return ActionFrame::Axial;
    if (s == "world") return ActionFrame::World;
    throw ConfigError("episode.action_frame: unknown value '" + s + "'");
}

json palette_to_json(const FacePalette& p) {
    json arr = json::array();
    for (const Rgb& c : p.face) arr.push_back({c.r, c.g, c.b});
    return arr;
}

FacePalette palette_from_json(const json& j) {
    if (!j.is_array() || j.size() != 6)
        throw ConfigError("render.palette: expected 6 colors");
    FacePalette p{};
    for (int i = 0; i < 6; ++i) {
        const auto& c = j[i];
        p.face[i] = {uint8_t(c.at(0).get<int>()), uint8_t(c.at(1).get<int>()),
                     uint8_t(c.at(2).get<int>())};
    }
    return p;
}

template <typename T>
void take(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string dump_config(const RunConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["scene"] = {{"image_width", cfg.scene.image_width},
                  {"image_height", cfg.scene.image_height},
                  {"focal", cfg.scene.focal},
                  {"z_min", cfg.scene.z_min},
                  {"z_max", cfg.scene.z_max},
                  {"min_objects", cfg.scene.min_objects},
                  {"max_objects", cfg.scene.max_objects},
                  {"ground_y", cfg.scene.ground_y},
                  {"max_retries", cfg.scene.max_retries},
                  {"background", {cfg.scene.background.r, cfg.scene.background.g,
                                  cfg.scene.background.b}}};
    j["episode"] = {{"delta", cfg.episode.delta},
                    {"max_steps", cfg.episode.max_steps},
                    {"success_iou", cfg.episode.success_iou},
                    {"theta_stride", cfg.episode.theta_stride},
                    {"action_frame", frame_name(cfg.episode.action_frame)},
                    {"eval_epsilon", cfg.episode.eval_epsilon}};
    j["train"] = {{"gamma", cfg.train.gamma},
                  {"lr_pretrain", cfg.train.lr_pretrain},
                  {"lr_rl", cfg.train.lr_rl},
                  {"batch_size", cfg.train.batch_size},
                  {"target_update_every", cfg.train.target_update_every},
                  {"rl_iterations", cfg.train.rl_iterations},
                  {"epsilon_start", cfg.train.epsilon_start},
                  {"epsilon_end", cfg.train.epsilon_end},
                  {"pretrain_epochs", cfg.train.pretrain_epochs},
                  {"pretrain_lr_step", cfg.train.pretrain_lr_step},
                  {"pretrain_lr_decay", cfg.train.pretrain_lr_decay},
                  {"buffer_capacity", cfg.train.buffer_capacity},
                  {"probe_every", cfg.train.probe_every},
                  {"encoder_hidden", cfg.train.encoder_hidden}};
    j["jitter"] = {{"sigma", cfg.jitter.sigma},
                   {"samples_per_object", cfg.jitter.samples_per_object}};
    j["render"] = {{"state_size", cfg.render.state_size},
                   {"mode", mode_name(cfg.render.mode)},
                   {"palette", palette_to_json(cfg.render.palette)}};
    j["data"] = {{"train_scenes", cfg.data.train_scenes},
                 {"probe_scenes", cfg.data.probe_scenes},
                 {"probe_per_object", cfg.data.probe_per_object},
                 {"pretrain_jitters_per_object", cfg.data.pretrain_jitters_per_object}};
    return j.dump(2);
}

void apply_config_json(RunConfig& cfg, const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    take(j, "seed", cfg.seed);
    if (j.contains("scene")) {
        const json& s = j["scene"];
        take(s, "image_width", cfg.scene.image_width);
        take(s, "image_height", cfg.scene.image_height);
        take(s, "focal", cfg.scene.focal);
        take(s, "z_min", cfg.scene.z_min);
        take(s, "z_max", cfg.scene.z_max);
        take(s, "min_objects", cfg.scene.min_objects);
        take(s, "max_objects", cfg.scene.max_objects);
        take(s, "ground_y", cfg.scene.ground_y);
        take(s, "max_retries", cfg.scene.max_retries);
        if (s.contains("background")) {
            const auto& b = s["background"];
            cfg.scene.background = {uint8_t(b.at(0).get<int>()),
                                    uint8_t(b.at(1).get<int>()),
                                    uint8_t(b.at(2).get<int>())};
        }
    }
    if (j.contains("episode")) {
        const json& e = j["episode"];
        take(e, "delta", cfg.episode.delta);
        take(e, "max_steps", cfg.episode.max_steps);
        take(e, "success_iou", cfg.episode.success_iou);
        take(e, "theta_stride", cfg.episode.theta_stride);
        if (e.contains("action_frame"))
            cfg.episode.action_frame = frame_from(e["action_frame"].get<std::string>());
        take(e, "eval_epsilon", cfg.episode.eval_epsilon);
    }
    if (j.contains("train")) {
        const json& t = j["train"];
        take(t, "gamma", cfg.train.gamma);
        take(t, "lr_pretrain", cfg.train.lr_pretrain);
        take(t, "lr_rl", cfg.train.lr_rl);
        take(t, "batch_size", cfg.train.batch_size);
        take(t, "target_update_every", cfg.train.target_update_every);
        take(t, "rl_iterations", cfg.train.rl_iterations);
        take(t, "epsilon_start", cfg.train.epsilon_start);
        take(t, "epsilon_end", cfg.train.epsilon_end);
        take(t, "pretrain_epochs", cfg.train.pretrain_epochs);
        take(t, "pretrain_lr_step", cfg.train.pretrain_lr_step);
        take(t, "pretrain_lr_decay", cfg.train.pretrain_lr_decay);
        take(t, "buffer_capacity", cfg.train.buffer_capacity);
        take(t, "probe_every", cfg.train.probe_every);
        take(t, "encoder_hidden", cfg.train.encoder_hidden);
    }
    if (j.contains("jitter")) {
        const json& g = j["jitter"];
        take(g, "sigma", cfg.jitter.sigma);
        take(g, "samples_per_object", cfg.jitter.samples_per_object);
    }
    if (j.contains("render")) {
        const json& r = j["render"];
        take(r, "state_size", cfg.render.state_size);
        if (r.contains("mode")) cfg.render.mode = mode_from(r["mode"].get<std::string>());
        if (r.contains("palette")) cfg.render.palette = palette_from_json(r["palette"]);
    }
    if (j.contains("data")) {
        const json& d = j["data"];
        take(d, "train_scenes", cfg.data.train_scenes);
        take(d, "probe_scenes", cfg.data.probe_scenes);
        take(d, "probe_per_object", cfg.data.probe_per_object);
        take(d, "pretrain_jitters_per_object", cfg.data.pretrain_jitters_per_object);
    }
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    apply_config_json(cfg, text);
    return cfg;
}

RunConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void save_config_file(const RunConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open for writing: " + path);
    out << dump_config(cfg) << "\n";
}

void validate(const RunConfig& cfg) {
    auto fail = [](const std::string& field, const std::string& why) {
        throw ConfigError(field + ": " + why);
    };
    if (!(cfg.episode.delta > 0 && cfg.episode.delta < 1))
        fail("episode.delta", "must be in (0, 1)");
    if (cfg.episode.max_steps < 1) fail("episode.max_steps", "must be >= 1");
    if (!(cfg.episode.success_iou > 0 && cfg.episode.success_iou <= 1))
        fail("episode.success_iou", "must be in (0, 1]");
    if (!(cfg.episode.theta_stride > 0)) fail("episode.theta_stride", "must be > 0");
    if (!(cfg.episode.eval_epsilon >= 0 && cfg.episode.eval_epsilon <= 1))
        fail("episode.eval_epsilon", "must be in [0, 1]");
    if (!(cfg.train.gamma > 0 && cfg.train.gamma < 1))
        fail("train.gamma", "must be in (0, 1)");
    if (!(cfg.train.epsilon_end >= 0 && cfg.train.epsilon_end <= cfg.train.epsilon_start &&
          cfg.train.epsilon_start <= 1))
        fail("train.epsilon", "need 0 <= epsilon_end <= epsilon_start <= 1");
    if (cfg.train.batch_size < 1) fail("train.batch_size", "must be >= 1");
    if (cfg.train.rl_iterations < 0) fail("train.rl_iterations", "must be >= 0");
    if (cfg.train.buffer_capacity < size_t(cfg.train.batch_size))
        fail("train.buffer_capacity", "must hold at least one batch");
    if (cfg.train.encoder_hidden.empty())
        fail("train.encoder_hidden", "need at least one hidden layer");
    for (int h : cfg.train.encoder_hidden)
        if (h < 1) fail("train.encoder_hidden", "layer widths must be >= 1");
    for (double s : cfg.jitter.sigma)
        if (s < 0) fail("jitter.sigma", "must be >= 0");
    if (cfg.jitter.samples_per_object < 1)
        fail("jitter.samples_per_object", "must be >= 1");
    if (cfg.render.state_size < 8) fail("render.state_size", "must be >= 8");
    if (cfg.scene.image_width < 32 || cfg.scene.image_height < 32)
        fail("scene.image_size", "must be at least 32x32");
    if (!(cfg.scene.z_min > 0 && cfg.scene.z_max > cfg.scene.z_min))
        fail("scene.z_range", "need 0 < z_min < z_max");
    if (cfg.scene.min_objects < 1 || cfg.scene.max_objects < cfg.scene.min_objects)
        fail("scene.objects", "need 1 <= min_objects <= max_objects");
    // palette colors must be pairwise distinct and the front face blue
    for (int i = 0; i < 6; ++i)
        for (int k = i + 1; k < 6; ++k)
            if (cfg.render.palette.face[i] == cfg.render.palette.face[k])
                fail("render.palette", "face colors must be pairwise distinct");
    const Rgb front = cfg.render.palette.face[int(Face::Front)];
    if (!(front.b > front.r && front.b > front.g))
        fail("render.palette", "front face must be blue-dominant");
}

uint64_t config_hash(const RunConfig& cfg) {
    std::ostringstream ss;
    ss << "S=" << cfg.render.state_size << ";hidden=";
    for (size_t i = 0; i < cfg.train.encoder_hidden.size(); ++i)
        ss << (i ? "," : "") << cfg.train.encoder_hidden[i];
    ss << ";history=" << kHistoryDim << ";actions=" << kNumActions
       << ";mode=" << mode_name(cfg.render.mode)
       << ";frame=" << frame_name(cfg.episode.action_frame);
    uint64_t h = 14695981039346656037ULL;
    for (char c : ss.str()) {
        h ^= uint8_t(c);
        h *= 1099511628211ULL;
    }
    return h;
}

std::vector<std::string> check_reference_defaults() {
    std::vector<std::string> bad;
    const RunConfig cfg = RunConfig::defaults();
    auto expect = [&](bool ok, const std::string& what) {
        if (!ok) bad.push_back(what);
    };
    expect(kNumActions == 15, "action set must have 15 entries");
    expect(cfg.episode.max_steps == 20, "episode.max_steps must default to 20");
    expect(cfg.episode.delta == 0.05, "episode.delta must default to 0.05");
    expect(cfg.episode.success_iou == 0.7, "episode.success_iou must default to 0.7");
    expect(cfg.episode.eval_epsilon == 0.05, "episode.eval_epsilon must default to 0.05");
    expect(cfg.train.gamma == 0.9, "train.gamma must default to 0.9");
    expect(cfg.train.buffer_capacity == 10000, "train.buffer_capacity must default to 1e4");
    expect(cfg.train.target_update_every == 1000,
           "train.target_update_every must default to 1000");
    expect(cfg.train.epsilon_start == 0.5, "train.epsilon_start must default to 0.5");
    expect(cfg.train.epsilon_end == 0.05, "train.epsilon_end must default to 0.05");
    expect(cfg.train.batch_size == 64, "train.batch_size must default to 64");
    expect(cfg.train.lr_pretrain == 1e-2, "train.lr_pretrain must default to 1e-2");
    expect(cfg.train.lr_rl == 1e-4, "train.lr_rl must default to 1e-4");
    expect(cfg.train.pretrain_epochs == 15, "train.pretrain_epochs must default to 15");
    expect(cfg.jitter.samples_per_object == 300,
           "jitter.samples_per_object must default to 300");
    return bad;
}

}  // namespace boxrefine

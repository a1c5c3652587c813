#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "boxrefine/agent.hpp"
#include "boxrefine/env.hpp"
#include "boxrefine/mask.hpp"
#include "boxrefine/scene.hpp"

namespace boxrefine {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// How much data the train/eval commands synthesize.
struct DataConfig {
    int train_scenes = 12;
    int probe_scenes = 8;
    int probe_per_object = 2;
    int pretrain_jitters_per_object = 0;  // 0 = jitter.samples_per_object
};

struct RunConfig {
    uint64_t seed = 0;
    SceneParams scene;
    EpisodeConfig episode;
    TrainConfig train;
    JitterSpec jitter;
    RenderConfig render;
    DataConfig data;

    // Reference defaults.
    static RunConfig defaults() { return {}; }
    // Small-budget preset used by the train/eval commands when no config
    // file is given: 32 px states and 5000 RL iterations.
    static RunConfig desk();
};

std::string dump_config(const RunConfig& cfg);          // canonical JSON
RunConfig parse_config(const std::string& json_text);   // defaults overlaid with file
void apply_config_json(RunConfig& cfg, const std::string& json_text);

RunConfig load_config_file(const std::string& path);
void save_config_file(const RunConfig& cfg, const std::string& path);

// Throws ConfigError naming the offending field.
void validate(const RunConfig& cfg);

// FNV-1a hash over the fields a checkpoint depends on (state size,
// encoder widths, mask mode, action frame).
uint64_t config_hash(const RunConfig& cfg);

// Checks that reference defaults match the published hyperparameters:
// 15 actions, 20 steps, stride 0.05, gamma 0.9, buffer 1e4, target sync
// 1000, epsilon 0.5 -> 0.05, 300 jitter samples per object. Returns the
// list of violations (empty = conforming).
std::vector<std::string> check_reference_defaults();

}  // namespace boxrefine

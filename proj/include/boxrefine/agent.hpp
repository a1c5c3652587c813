#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "boxrefine/env.hpp"
#include "boxrefine/net.hpp"
#include "boxrefine/replay.hpp"
#include "boxrefine/scene.hpp"

namespace boxrefine {

struct StructureMismatch : std::runtime_error {
    StructureMismatch() : std::runtime_error("networks have different structure") {}
};

struct EmptyDataset : std::runtime_error {
    EmptyDataset() : std::runtime_error("pretraining dataset is empty") {}
};

struct TrainConfig {
    double gamma = 0.9;
    double lr_pretrain = 1e-2;
    double lr_rl = 1e-4;
    int batch_size = 64;
    int target_update_every = 1000;
    int rl_iterations = 40000;
    double epsilon_start = 0.5;
    double epsilon_end = 0.05;
    int pretrain_epochs = 15;
    int pretrain_lr_step = 5;      // decay x0.1 every this many epochs
    double pretrain_lr_decay = 0.1;
    size_t buffer_capacity = 10000;
    int probe_every = 500;
    std::vector<int> encoder_hidden = {256, 128};
};

// Exponential decay toward epsilon_end with tau = rl_iterations / 5.
double epsilon_at(int iteration, const TrainConfig& cfg);

// Network input assembly: raw patch bytes scaled to [0, 1], history as
// the one-hot block encoding.
Eigen::VectorXd state_input(const StoredState& s);
Eigen::VectorXd history_input(const std::array<int, kHistoryLen>& recent);

// Epsilon-greedy over the Q-values; ties go to the lowest index.
Action select_action(const QNetwork& net, const Eigen::VectorXd& state,
                     const Eigen::VectorXd& history, double epsilon, std::mt19937_64& rng);

struct TdResult {
    double loss = 0;
    Eigen::VectorXd grad;
};

// Mean squared TD error over the batch:
//   [r + gamma * max_a Q_target(s', a) - Q(s, a)]^2
// with the target term treated as a constant; terminal rows use r
// alone.
TdResult td_loss(const std::vector<const Transition*>& batch, const QNetwork& net,
                 const QNetwork& target, double gamma);

void sync_target(const QNetwork& net, QNetwork& target);

// Plain SGD: p -= lr * g.
class SgdOptimizer {
public:
    double lr;
    explicit SgdOptimizer(double lr_) : lr(lr_) {}
    void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
        params -= lr * grad;
    }
};

// Adam:
//   m = b1*m + (1-b1)*g        v = b2*v + (1-b2)*g^2
//   p -= lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
class AdamOptimizer {
public:
    AdamOptimizer(int n, double lr, double beta1 = 0.9, double beta2 = 0.999,
                  double eps = 1e-8);
    void step(Eigen::VectorXd& params, const Eigen::VectorXd& grad);

private:
    double lr_, beta1_, beta2_, eps_;
    long t_ = 0;
    Eigen::VectorXd m_, v_;
};

// ---- supervised pretraining ----

struct PretrainSample {
    StoredState state;
    int label = 0;  // action index
};

// The action that fixes the largest normalized residual
// |gt_k - est_k| / stride_k, sign-matched; translations are measured in
// the configured action frame. NONE only when every residual is zero.
Action best_correction_action(const Box3D& est, const Box3D& gt, const EpisodeConfig& cfg);

struct PretrainReport {
    std::vector<double> epoch_loss;
};

// Cross-entropy classification over the Q-values as logits, SGD with
// the stepped learning-rate schedule.
PretrainReport pretrain(QNetwork& net, const std::vector<PretrainSample>& dataset,
                        const TrainConfig& cfg, uint64_t seed);

// ---- episodes ----

using Policy =
    std::function<Action(const Observation&, const EpisodeState&, std::mt19937_64&)>;

Policy greedy_policy(const QNetwork& net, double epsilon);
Policy oracle_policy(const EpisodeConfig& cfg);
Policy random_policy();

struct RefineResult {
    Box3D final_box;
    std::vector<StepRecord> trajectory;
    bool aborted = false;
};

// Runs one episode to termination. On EpisodeAborted the initial
// estimate is returned unchanged with the aborted flag set.
RefineResult refine(const Policy& policy, const Box3D& initial, const Image& image,
                    const CameraModel& cam, const EpisodeConfig& cfg,
                    const RenderConfig& render, uint64_t seed,
                    const std::optional<Box3D>& gt = {});

RefineResult refine(const QNetwork& net, double epsilon, const Box3D& initial,
                    const Image& image, const CameraModel& cam, const EpisodeConfig& cfg,
                    const RenderConfig& render, uint64_t seed,
                    const std::optional<Box3D>& gt = {});

// Independent episodes over a batch of objects; per-object results are
// identical to sequential execution (each episode owns an rng seeded by
// base_seed + index). `threads` <= 1 forces sequential.
std::vector<RefineResult> refine_batch(const Policy& policy,
                                       const std::vector<Box3D>& initials,
                                       const Image& image, const CameraModel& cam,
                                       const EpisodeConfig& cfg, const RenderConfig& render,
                                       uint64_t base_seed,
                                       const std::vector<std::optional<Box3D>>& gts,
                                       int threads);

// ---- DQN training loop ----

struct EpisodeSeed {
    const Scene* scene = nullptr;
    int object_index = 0;
    Box3D initial;
};

using EpisodeSource = std::function<EpisodeSeed(std::mt19937_64&)>;

struct TrainLogEntry {
    int iteration = 0;
    double loss = 0;
    double epsilon = 0;
    std::optional<double> probe_mean_iou_gain;
};

struct TrainResult {
    std::vector<TrainLogEntry> log;
};

// Epsilon-greedy rollouts into the replay buffer, one TD update per
// iteration, target sync every target_update_every, probe evaluation
// (epsilon = 0) every probe_every. Aborted episodes store a terminal -3
// transition and are not fatal. Single-threaded and bit-reproducible
// for a fixed seed.
TrainResult train_dqn(QNetwork& net, const EpisodeSource& source,
                      const std::vector<EpisodeSeed>& probe, const TrainConfig& cfg,
                      const EpisodeConfig& ecfg, const RenderConfig& render, uint64_t seed);

// Mean iou(final) - iou(initial) over the probe set at epsilon = 0.
double evaluate_probe(const QNetwork& net, const std::vector<EpisodeSeed>& probe,
                      const EpisodeConfig& ecfg, const RenderConfig& render);

// ---- checkpoints ----

struct Checkpoint {
    NetShape shape;
    Eigen::VectorXd params;
    uint64_t config_hash = 0;
};

void save_checkpoint(const QNetwork& net, uint64_t config_hash, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);
QNetwork network_from_checkpoint(const Checkpoint& ck);

}  // namespace boxrefine

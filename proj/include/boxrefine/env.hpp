#pragma once

#include <array>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "boxrefine/geometry.hpp"
#include "boxrefine/mask.hpp"

namespace boxrefine {

struct EpisodeAlreadyTerminated : std::runtime_error {
    EpisodeAlreadyTerminated() : std::runtime_error("episode already terminated") {}
};

struct MissingGroundTruth : std::runtime_error {
    MissingGroundTruth() : std::runtime_error("operation requires a ground-truth box") {}
};

// Raised when a state cannot be formed (projection invalid or crop
// empty); the episode is scored as a terminal failure.
struct EpisodeAborted : std::runtime_error {
    explicit EpisodeAborted(const std::string& why)
        : std::runtime_error("episode aborted: " + why) {}
};

inline constexpr int kNumActions = 15;
inline constexpr int kHistoryLen = 10;
inline constexpr int kHistoryDim = kNumActions * kHistoryLen;

enum class ActionKind : int {
    None = 0,
    PosX, NegX,          // along the width axis
    PosY, NegY,          // along the height axis
    PosZ, NegZ,          // along the forward/length axis
    PosH, NegH,
    PosW, NegW,
    PosL, NegL,
    PosTheta, NegTheta,
};

struct Action {
    ActionKind kind = ActionKind::None;

    int index() const { return int(kind); }
    static Action from_index(int i);
    const char* name() const;
    bool operator==(const Action&) const = default;
};

// Translation actions are defined in the object's axial frame by
// default; the world option exists for ablation.
enum class ActionFrame { Axial, World };

struct EpisodeConfig {
    double delta = 0.05;         // stride as a ratio of the matching dimension
    int max_steps = 20;
    double success_iou = 0.7;
    double theta_stride = 0.05;  // radians
    ActionFrame action_frame = ActionFrame::Axial;
    double eval_epsilon = 0.05;
};

struct EpisodeState {
    Box3D estimate;
    std::optional<Box3D> ground_truth;
    int step = 0;
    std::deque<int> history;  // last kHistoryLen action indices, oldest first
    bool terminated = false;
};

// Per-parameter delta (x, y, z, h, w, l, theta); exactly the components
// the action touches are nonzero.
using ParamDelta = std::array<double, 7>;

ParamDelta action_displacement(Action a, const Box3D& box, const EpisodeConfig& cfg);

// Applies the action's displacement to a box: dimensions clamped to a
// 0.1 m floor, theta renormalized.
Box3D apply_action(const Box3D& box, Action a, const EpisodeConfig& cfg);

EpisodeState transition(const EpisodeState& s, Action a, const EpisodeConfig& cfg);

// Reward per step. Terminal steps earn +3/-3 against the success
// threshold; otherwise the sign of the 3D-IoU change, falling back to
// the sign of the parameter step projected onto the residual when the
// IoU does not move.
int reward(const Box3D& prev, const Box3D& next, const std::optional<Box3D>& gt,
           Action a, bool terminal, const EpisodeConfig& cfg);

struct Observation {
    StateImage state;
    std::array<int, kHistoryLen> recent;  // action indices, -1 = empty slot
};

// One-hot concatenation of the recent slots: kHistoryLen blocks of
// kNumActions entries, zero-padded.
std::array<double, kHistoryDim> encode_history(const std::array<int, kHistoryLen>& recent);

Observation observe(const EpisodeState& s, const Image& image, const CameraModel& cam,
                    const RenderConfig& render);

// Exhaustive one-step lookahead against the true IoU: picks the action
// whose outcome maximizes iou_3d(next, gt), lowest index on ties, NONE
// when nothing strictly improves. A validation baseline, not a learned
// policy.
Action greedy_oracle_policy(const EpisodeState& s, const EpisodeConfig& cfg);

struct StepRecord {
    int step = 0;
    int action = 0;
    std::array<double, 7> params{};
    std::optional<double> iou;
    std::optional<int> reward;
};

// One line of line-delimited JSON per step.
std::string step_record_json(const StepRecord& r);
StepRecord parse_step_record(const std::string& line);

}  // namespace boxrefine

#include "boxrefine/env.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace boxrefine {

namespace {
constexpr double kMinDimension = 0.1;
}

Action Action::from_index(int i) {
    if (i < 0 || i >= kNumActions) throw std::out_of_range("action index");
    return Action{ActionKind(i)};
}

const char* Action::name() const {
    static const char* names[kNumActions] = {
        "none", "+x'", "-x'", "+y'", "-y'", "+z'", "-z'",
        "+h", "-h", "+w", "-w", "+l", "-l", "+theta", "-theta"};
    return names[index()];
}

ParamDelta action_displacement(Action a, const Box3D& box, const EpisodeConfig& cfg) {
    ParamDelta d{};
    const double sx = cfg.delta * box.w;  // width-axis stride
    const double sy = cfg.delta * box.h;
    const double sz = cfg.delta * box.l;  // forward-axis stride

    auto translate = [&](double ax, double ay, double az) {
        if (cfg.action_frame == ActionFrame::Axial) {
            const WorldDisplacement wd = axial_to_world({ax, ay, az}, box.theta);
            d[0] = wd.dx;
            d[1] = wd.dy;
            d[2] = wd.dz;
        } else {
            d[0] = ax;
            d[1] = ay;
            d[2] = az;
        }
    };

    switch (a.kind) {
        case ActionKind::None: break;
        case ActionKind::PosX: translate(+sx, 0, 0); break;
        case ActionKind::NegX: translate(-sx, 0, 0); break;
        case ActionKind::PosY: translate(0, +sy, 0); break;
        case ActionKind::NegY: translate(0, -sy, 0); break;
        case ActionKind::PosZ: translate(0, 0, +sz); break;
        case ActionKind::NegZ: translate(0, 0, -sz); break;
        case ActionKind::PosH: d[3] = +sy; break;
        case ActionKind::NegH: d[3] = -sy; break;
        case ActionKind::PosW: d[4] = +sx; break;
        case ActionKind::NegW: d[4] = -sx; break;
        case ActionKind::PosL: d[5] = +sz; break;
        case ActionKind::NegL: d[5] = -sz; break;
        case ActionKind::PosTheta: d[6] = +cfg.theta_stride; break;
        case ActionKind::NegTheta: d[6] = -cfg.theta_stride; break;
    }
    return d;
}

Box3D apply_action(const Box3D& box, Action a, const EpisodeConfig& cfg) {
    const ParamDelta d = action_displacement(a, box, cfg);
    Box3D next = box;
    next.x += d[0];
    next.y += d[1];
    next.z += d[2];
    next.h = std::max(kMinDimension, next.h + d[3]);
    next.w = std::max(kMinDimension, next.w + d[4]);
    next.l = std::max(kMinDimension, next.l + d[5]);
    // re-wrap only on range exit so no-op components stay bit-identical
    const double t = next.theta + d[6];
    next.theta = (t >= M_PI || t < -M_PI) ? wrap_angle(t) : t;
    return next;
}

EpisodeState transition(const EpisodeState& s, Action a, const EpisodeConfig& cfg) {
    if (s.terminated) throw EpisodeAlreadyTerminated{};
    EpisodeState next = s;
    next.estimate = apply_action(s.estimate, a, cfg);
    next.step = s.step + 1;
    next.history.push_back(a.index());
    while (int(next.history.size()) > kHistoryLen) next.history.pop_front();
    next.terminated = (a.kind == ActionKind::None) || (next.step >= cfg.max_steps);
    return next;
}

int reward(const Box3D& prev, const Box3D& next, const std::optional<Box3D>& gt,
           Action /*a*/, bool terminal, const EpisodeConfig& cfg) {
    if (!gt) throw MissingGroundTruth{};
    if (terminal) {
        return iou_3d(next, *gt) >= cfg.success_iou ? +3 : -3;
    }
    const double diff = iou_3d(next, *gt) - iou_3d(prev, *gt);
    if (diff > 0) return +1;
    if (diff < 0) return -1;
    // IoU unchanged (typically zero overlap): sign of the step projected
    // onto the residual, theta components wrapped.
    const double step[7] = {next.x - prev.x, next.y - prev.y, next.z - prev.z,
                            next.h - prev.h, next.w - prev.w, next.l - prev.l,
                            wrap_angle(next.theta - prev.theta)};
    const double resid[7] = {gt->x - prev.x, gt->y - prev.y, gt->z - prev.z,
                             gt->h - prev.h, gt->w - prev.w, gt->l - prev.l,
                             wrap_angle(gt->theta - prev.theta)};
    double dot = 0;
    for (int k = 0; k < 7; ++k) dot += step[k] * resid[k];
    return dot > 0 ? +1 : (dot < 0 ? -1 : 0);
}

std::array<double, kHistoryDim> encode_history(const std::array<int, kHistoryLen>& recent) {
    std::array<double, kHistoryDim> out{};
    for (int slot = 0; slot < kHistoryLen; ++slot) {
        const int a = recent[slot];
        if (a >= 0 && a < kNumActions) out[slot * kNumActions + a] = 1.0;
    }
    return out;
}

Observation observe(const EpisodeState& s, const Image& image, const CameraModel& cam,
                    const RenderConfig& render) {
    if (s.terminated) throw EpisodeAlreadyTerminated{};
    Observation obs;
    try {
        obs.state = build_state(s.estimate, image, cam, render);
    } catch (const BehindCamera&) {
        throw EpisodeAborted("box behind camera");
    } catch (const EmptyCrop&) {
        throw EpisodeAborted("empty crop");
    }
    obs.recent.fill(-1);
    int slot = 0;
    for (int a : s.history) obs.recent[slot++] = a;
    return obs;
}

Action greedy_oracle_policy(const EpisodeState& s, const EpisodeConfig& cfg) {
    if (!s.ground_truth) throw MissingGroundTruth{};
    const Box3D& gt = *s.ground_truth;
    const double current = iou_3d(s.estimate, gt);
    Action best{ActionKind::None};
    double best_iou = current;
    for (int i = 1; i < kNumActions; ++i) {
        const Action a = Action::from_index(i);
        const double iou = iou_3d(apply_action(s.estimate, a, cfg), gt);
        if (iou > best_iou) {
            best_iou = iou;
            best = a;
        }
    }
    return best;
}

std::string step_record_json(const StepRecord& r) {
    nlohmann::json j;
    j["step"] = r.step;
    j["action"] = r.action;
    j["params"] = r.params;
    if (r.iou) j["iou"] = *r.iou;
    if (r.reward) j["reward"] = *r.reward;
    return j.dump();
}

StepRecord parse_step_record(const std::string& line) {
    const auto j = nlohmann::json::parse(line);
    StepRecord r;
    r.step = j.at("step").get<int>();
    r.action = j.at("action").get<int>();
    r.params = j.at("params").get<std::array<double, 7>>();
    if (j.contains("iou")) r.iou = j["iou"].get<double>();
    if (j.contains("reward")) r.reward = j["reward"].get<int>();
    return r;
}

}  // namespace boxrefine

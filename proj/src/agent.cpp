#include "boxrefine/agent.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstring>
#include <fstream>
#include <thread>

namespace boxrefine {

double epsilon_at(int iteration, const TrainConfig& cfg) {
    const double tau = std::max(1.0, cfg.rl_iterations / 5.0);
    return cfg.epsilon_end +
           (cfg.epsilon_start - cfg.epsilon_end) * std::exp(-iteration / tau);
}

Eigen::VectorXd state_input(const StoredState& s) {
    Eigen::VectorXd v(s.pixels.size());
    for (size_t i = 0; i < s.pixels.size(); ++i) v[long(i)] = s.pixels[i] / 255.0;
    return v;
}

Eigen::VectorXd history_input(const std::array<int, kHistoryLen>& recent) {
    const auto enc = encode_history(recent);
    Eigen::VectorXd v(kHistoryDim);
    for (int i = 0; i < kHistoryDim; ++i) v[i] = enc[i];
    return v;
}

namespace {

int argmax_lowest(const Eigen::VectorXd& q) {
    int best = 0;
    for (int i = 1; i < q.size(); ++i)
        if (q[i] > q[best]) best = i;
    return best;
}

}  // namespace

Action select_action(const QNetwork& net, const Eigen::VectorXd& state,
                     const Eigen::VectorXd& history, double epsilon, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0, 1);
    if (u01(rng) < epsilon) {
        std::uniform_int_distribution<int> pick(0, kNumActions - 1);
        return Action::from_index(pick(rng));
    }
    const Eigen::MatrixXd q = net.forward(state.transpose(), history.transpose());
    return Action::from_index(argmax_lowest(q.row(0).transpose()));
}

TdResult td_loss(const std::vector<const Transition*>& batch, const QNetwork& net,
                 const QNetwork& target, double gamma) {
    if (net.shape() != target.shape()) throw StructureMismatch{};
    const int n = int(batch.size());
    if (n == 0) throw std::runtime_error("empty batch");
    const int dim = net.shape().state_dim;

    Eigen::MatrixXd states(n, dim), hist(n, kHistoryDim);
    std::vector<int> next_rows;
    for (int i = 0; i < n; ++i) {
        states.row(i) = state_input(batch[i]->state).transpose();
        hist.row(i) = history_input(batch[i]->state.recent).transpose();
        if (!batch[i]->terminal) next_rows.push_back(i);
    }

    Eigen::VectorXd targets(n);
    for (int i = 0; i < n; ++i) targets[i] = batch[i]->reward;
    if (!next_rows.empty()) {
        const int m = int(next_rows.size());
        Eigen::MatrixXd nstates(m, dim), nhist(m, kHistoryDim);
        for (int k = 0; k < m; ++k) {
            const StoredState& ns = *batch[next_rows[k]]->next_state;
            nstates.row(k) = state_input(ns).transpose();
            nhist.row(k) = history_input(ns.recent).transpose();
        }
        const Eigen::MatrixXd nq = target.forward(nstates, nhist);
        for (int k = 0; k < m; ++k)
            targets[next_rows[k]] += gamma * nq.row(k).maxCoeff();
    }

    QNetwork::Cache cache = net.forward_cached(states, hist);
    Eigen::MatrixXd dq = Eigen::MatrixXd::Zero(n, net.shape().actions);
    double loss = 0;
    for (int i = 0; i < n; ++i) {
        const double err = cache.q(i, batch[i]->action) - targets[i];
        loss += err * err;
        dq(i, batch[i]->action) = 2.0 * err / n;
    }
    return {loss / n, net.backward(cache, dq)};
}

void sync_target(const QNetwork& net, QNetwork& target) {
    if (net.shape() != target.shape()) throw StructureMismatch{};
    target.params() = net.params();
}

AdamOptimizer::AdamOptimizer(int n, double lr, double beta1, double beta2, double eps)
    : lr_(lr), beta1_(beta1), beta2_(beta2), eps_(eps) {
    m_ = Eigen::VectorXd::Zero(n);
    v_ = Eigen::VectorXd::Zero(n);
}

void AdamOptimizer::step(Eigen::VectorXd& params, const Eigen::VectorXd& grad) {
    ++t_;
    m_ = beta1_ * m_ + (1 - beta1_) * grad;
    v_ = beta2_ * v_ + (1 - beta2_) * grad.cwiseProduct(grad);
    const double mc = 1 - std::pow(beta1_, double(t_));
    const double vc = 1 - std::pow(beta2_, double(t_));
    params -= lr_ * (m_ / mc).cwiseQuotient(((v_ / vc).cwiseSqrt().array() + eps_).matrix());
}

Action best_correction_action(const Box3D& est, const Box3D& gt, const EpisodeConfig& cfg) {
    double resid[7];
    if (cfg.action_frame == ActionFrame::Axial) {
        const AxialDisplacement a =
            world_to_axial({gt.x - est.x, gt.y - est.y, gt.z - est.z}, est.theta);
        resid[0] = a.dx_a;
        resid[1] = a.dy_a;
        resid[2] = a.dz_a;
    } else {
        resid[0] = gt.x - est.x;
        resid[1] = gt.y - est.y;
        resid[2] = gt.z - est.z;
    }
    resid[3] = gt.h - est.h;
    resid[4] = gt.w - est.w;
    resid[5] = gt.l - est.l;
    resid[6] = wrap_angle(gt.theta - est.theta);

    const double stride[7] = {cfg.delta * est.w,  cfg.delta * est.h, cfg.delta * est.l,
                              cfg.delta * est.h,  cfg.delta * est.w, cfg.delta * est.l,
                              cfg.theta_stride};
    int best = -1;
    double best_score = 0;
    for (int k = 0; k < 7; ++k) {
        const double score = std::abs(resid[k]) / stride[k];
        if (score > best_score) {
            best_score = score;
            best = k;
        }
    }
    if (best < 0) return Action{ActionKind::None};
    const int index = 1 + 2 * best + (resid[best] > 0 ? 0 : 1);
    return Action::from_index(index);
}

PretrainReport pretrain(QNetwork& net, const std::vector<PretrainSample>& dataset,
                        const TrainConfig& cfg, uint64_t seed) {
    if (dataset.empty()) throw EmptyDataset{};
    const int n = int(dataset.size());
    const int dim = net.shape().state_dim;
    std::mt19937_64 rng(seed);
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;

    PretrainReport report;
    for (int epoch = 0; epoch < cfg.pretrain_epochs; ++epoch) {
        const double lr = cfg.lr_pretrain *
                          std::pow(cfg.pretrain_lr_decay, epoch / cfg.pretrain_lr_step);
        SgdOptimizer sgd(lr);
        // seeded shuffle, partial Fisher-Yates
        for (int i = 0; i < n - 1; ++i) {
            std::uniform_int_distribution<int> pick(i, n - 1);
            std::swap(order[i], order[pick(rng)]);
        }
        double epoch_loss = 0;
        int batches = 0;
        for (int start = 0; start < n; start += cfg.batch_size) {
            const int b = std::min(cfg.batch_size, n - start);
            Eigen::MatrixXd states(b, dim), hist(b, kHistoryDim);
            std::vector<int> labels(b);
            for (int i = 0; i < b; ++i) {
                const PretrainSample& s = dataset[order[start + i]];
                states.row(i) = state_input(s.state).transpose();
                hist.row(i) = history_input(s.state.recent).transpose();
                labels[i] = s.label;
            }
            QNetwork::Cache cache = net.forward_cached(states, hist);
            // softmax cross-entropy on the Q-values as logits
            Eigen::MatrixXd probs = cache.q;
            double loss = 0;
            for (int i = 0; i < b; ++i) {
                const double mx = probs.row(i).maxCoeff();
                Eigen::ArrayXd e = (probs.row(i).transpose().array() - mx).exp();
                const double sum = e.sum();
                probs.row(i) = (e / sum).matrix().transpose();
                loss -= std::log(std::max(probs(i, labels[i]), 1e-300));
            }
            loss /= b;
            Eigen::MatrixXd dq = probs;
            for (int i = 0; i < b; ++i) dq(i, labels[i]) -= 1.0;
            dq /= double(b);
            const Eigen::VectorXd grad = net.backward(cache, dq);
            sgd.step(net.params(), grad);
            epoch_loss += loss;
            ++batches;
        }
        report.epoch_loss.push_back(epoch_loss / std::max(1, batches));
    }
    return report;
}

Policy greedy_policy(const QNetwork& net, double epsilon) {
    return [&net, epsilon](const Observation& obs, const EpisodeState&,
                           std::mt19937_64& rng) {
        const StoredState stored = StoredState::from(obs);
        return select_action(net, state_input(stored), history_input(obs.recent), epsilon,
                             rng);
    };
}

Policy oracle_policy(const EpisodeConfig& cfg) {
    return [cfg](const Observation&, const EpisodeState& s, std::mt19937_64&) {
        return greedy_oracle_policy(s, cfg);
    };
}

Policy random_policy() {
    return [](const Observation&, const EpisodeState&, std::mt19937_64& rng) {
        std::uniform_int_distribution<int> pick(0, kNumActions - 1);
        return Action::from_index(pick(rng));
    };
}

RefineResult refine(const Policy& policy, const Box3D& initial, const Image& image,
                    const CameraModel& cam, const EpisodeConfig& cfg,
                    const RenderConfig& render, uint64_t seed,
                    const std::optional<Box3D>& gt) {
    std::mt19937_64 rng(seed);
    EpisodeState st;
    st.estimate = initial;
    st.estimate.normalize();
    st.ground_truth = gt;

    RefineResult result;
    while (!st.terminated) {
        Observation obs;
        try {
            obs = observe(st, image, cam, render);
        } catch (const EpisodeAborted&) {
            result.final_box = initial;
            result.aborted = true;
            return result;
        }
        const Action a = policy(obs, st, rng);
        const EpisodeState next = transition(st, a, cfg);
        StepRecord rec;
        rec.step = next.step;
        rec.action = a.index();
        rec.params = {next.estimate.x, next.estimate.y, next.estimate.z, next.estimate.h,
                      next.estimate.w, next.estimate.l, next.estimate.theta};
        if (gt) {
            rec.iou = iou_3d(next.estimate, *gt);
            rec.reward = reward(st.estimate, next.estimate, gt, a, next.terminated, cfg);
        }
        result.trajectory.push_back(rec);
        st = next;
    }
    result.final_box = st.estimate;
    return result;
}

RefineResult refine(const QNetwork& net, double epsilon, const Box3D& initial,
                    const Image& image, const CameraModel& cam, const EpisodeConfig& cfg,
                    const RenderConfig& render, uint64_t seed,
                    const std::optional<Box3D>& gt) {
    return refine(greedy_policy(net, epsilon), initial, image, cam, cfg, render, seed, gt);
}

std::vector<RefineResult> refine_batch(const Policy& policy,
                                       const std::vector<Box3D>& initials,
                                       const Image& image, const CameraModel& cam,
                                       const EpisodeConfig& cfg, const RenderConfig& render,
                                       uint64_t base_seed,
                                       const std::vector<std::optional<Box3D>>& gts,
                                       int threads) {
    std::vector<RefineResult> results(initials.size());
    auto run = [&](size_t i) {
        const std::optional<Box3D> gt = i < gts.size() ? gts[i] : std::nullopt;
        results[i] = refine(policy, initials[i], image, cam, cfg, render,
                            base_seed + i, gt);
    };
    if (threads <= 1 || initials.size() <= 1) {
        for (size_t i = 0; i < initials.size(); ++i) run(i);
        return results;
    }
    std::atomic<size_t> next{0};
    const int nthreads = std::min<int>(threads, int(initials.size()));
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) {
        pool.emplace_back([&] {
            for (size_t i = next.fetch_add(1); i < initials.size(); i = next.fetch_add(1))
                run(i);
        });
    }
    for (std::thread& t : pool) t.join();
    return results;
}

double evaluate_probe(const QNetwork& net, const std::vector<EpisodeSeed>& probe,
                      const EpisodeConfig& ecfg, const RenderConfig& render) {
    if (probe.empty()) return 0;
    double gain = 0;
    for (const EpisodeSeed& p : probe) {
        const Box3D& gt = p.scene->objects[p.object_index];
        const RefineResult r = refine(net, 0.0, p.initial, p.scene->image,
                                      p.scene->camera, ecfg, render, 0, gt);
        gain += iou_3d(r.final_box, gt) - iou_3d(p.initial, gt);
    }
    return gain / double(probe.size());
}

TrainResult train_dqn(QNetwork& net, const EpisodeSource& source,
                      const std::vector<EpisodeSeed>& probe, const TrainConfig& cfg,
                      const EpisodeConfig& ecfg, const RenderConfig& render,
                      uint64_t seed) {
    QNetwork target = net;
    ReplayBuffer buffer(cfg.buffer_capacity, seed ^ 0x9e3779b97f4a7c15ULL);
    std::mt19937_64 rng(seed);
    AdamOptimizer adam(net.param_count(), cfg.lr_rl);

    TrainResult result;
    EpisodeState cur;
    const Scene* cur_scene = nullptr;
    bool need_episode = true;
    int iter = 0;

    while (iter < cfg.rl_iterations) {
        if (need_episode) {
            const EpisodeSeed es = source(rng);
            cur = EpisodeState{};
            cur.estimate = es.initial;
            cur.estimate.normalize();
            cur.ground_truth = es.scene->objects[es.object_index];
            cur_scene = es.scene;
            need_episode = false;
        }

        Observation obs;
        try {
            obs = observe(cur, cur_scene->image, cur_scene->camera, render);
        } catch (const EpisodeAborted&) {
            need_episode = true;  // unusable initial estimate
            continue;
        }

        const double eps = epsilon_at(iter, cfg);
        const StoredState stored = StoredState::from(obs);
        const Action a =
            select_action(net, state_input(stored), history_input(obs.recent), eps, rng);
        const EpisodeState next = transition(cur, a, ecfg);

        Transition t;
        t.state = stored;
        t.action = a.index();
        if (next.terminated) {
            t.reward = reward(cur.estimate, next.estimate, cur.ground_truth, a, true, ecfg);
            t.terminal = true;
            need_episode = true;
        } else {
            try {
                const Observation obs2 =
                    observe(next, cur_scene->image, cur_scene->camera, render);
                t.reward =
                    reward(cur.estimate, next.estimate, cur.ground_truth, a, false, ecfg);
                t.next_state = StoredState::from(obs2);
                t.terminal = false;
                cur = next;
            } catch (const EpisodeAborted&) {
                t.reward = -3;
                t.terminal = true;
                need_episode = true;
            }
        }
        buffer.push(std::move(t));

        if (buffer.size() >= size_t(cfg.batch_size)) {
            const auto batch = buffer.sample(cfg.batch_size);
            const TdResult td = td_loss(batch, net, target, cfg.gamma);
            adam.step(net.params(), td.grad);
            ++iter;

            TrainLogEntry entry;
            entry.iteration = iter;
            entry.loss = td.loss;
            entry.epsilon = epsilon_at(iter, cfg);
            if (cfg.target_update_every > 0 && iter % cfg.target_update_every == 0)
                sync_target(net, target);
            if (cfg.probe_every > 0 && iter % cfg.probe_every == 0 && !probe.empty())
                entry.probe_mean_iou_gain = evaluate_probe(net, probe, ecfg, render);
            result.log.push_back(entry);
        }
    }
    return result;
}

// ---- checkpoints ----

namespace {
constexpr char kMagic[8] = {'B', 'R', 'C', 'K', 'P', 'T', '0', '1'};
}

void save_checkpoint(const QNetwork& net, uint64_t config_hash, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out.write(kMagic, 8);
    auto put_u64 = [&](uint64_t v) { out.write(reinterpret_cast<char*>(&v), 8); };
    auto put_i32 = [&](int32_t v) { out.write(reinterpret_cast<char*>(&v), 4); };
    put_u64(config_hash);
    const NetShape& s = net.shape();
    put_i32(s.state_dim);
    put_i32(s.history_dim);
    put_i32(s.actions);
    put_i32(int32_t(s.hidden.size()));
    for (int h : s.hidden) put_i32(h);
    put_u64(uint64_t(net.param_count()));
    out.write(reinterpret_cast<const char*>(net.params().data()),
              std::streamsize(net.param_count() * sizeof(double)));
    if (!out) throw std::runtime_error("short write: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    char magic[8];
    in.read(magic, 8);
    if (!in || std::memcmp(magic, kMagic, 8) != 0)
        throw std::runtime_error("not a checkpoint file: " + path);
    auto get_u64 = [&] {
        uint64_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 8);
        return v;
    };
    auto get_i32 = [&] {
        int32_t v = 0;
        in.read(reinterpret_cast<char*>(&v), 4);
        return v;
    };
    Checkpoint ck;
    ck.config_hash = get_u64();
    ck.shape.state_dim = get_i32();
    ck.shape.history_dim = get_i32();
    ck.shape.actions = get_i32();
    const int nh = get_i32();
    ck.shape.hidden.resize(nh);
    for (int i = 0; i < nh; ++i) ck.shape.hidden[i] = get_i32();
    const uint64_t count = get_u64();
    ck.params.resize(long(count));
    in.read(reinterpret_cast<char*>(ck.params.data()),
            std::streamsize(count * sizeof(double)));
    if (!in) throw std::runtime_error("truncated checkpoint: " + path);
    return ck;
}

QNetwork network_from_checkpoint(const Checkpoint& ck) {
    QNetwork net(ck.shape, 0);
    if (net.param_count() != ck.params.size())
        throw std::runtime_error("checkpoint parameter count mismatch");
    net.params() = ck.params;
    return net;
}

}  // namespace boxrefine

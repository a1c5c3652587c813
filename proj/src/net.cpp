#include "boxrefine/net.hpp"

#include <cmath>
#include <random>

namespace boxrefine {

QNetwork::QNetwork(NetShape shape, uint64_t seed) : shape_(std::move(shape)) {
    int offset = 0;
    int in = shape_.state_dim;
    for (int width : shape_.hidden) {
        layers_.push_back({offset, offset + width * in, width, in});
        offset += width * in + width;
        in = width;
    }
    const int fused = in + shape_.history_dim;
    layers_.push_back({offset, offset + shape_.actions * fused, shape_.actions, fused});
    offset += shape_.actions * fused + shape_.actions;

    params_.resize(offset);
    std::mt19937_64 rng(seed);
    for (const Layer& l : layers_) {
        const double limit = std::sqrt(6.0 / l.cols);
        std::uniform_real_distribution<double> dist(-limit, limit);
        for (int i = 0; i < l.rows * l.cols; ++i) params_[l.offset_w + i] = dist(rng);
        for (int i = 0; i < l.rows; ++i) params_[l.offset_b + i] = 0.0;
    }
}

Eigen::Map<const Eigen::MatrixXd> QNetwork::weight(const Layer& l) const {
    return {params_.data() + l.offset_w, l.rows, l.cols};
}

Eigen::Map<const Eigen::VectorXd> QNetwork::bias(const Layer& l) const {
    return {params_.data() + l.offset_b, l.rows};
}

QNetwork::Cache QNetwork::forward_cached(const Eigen::MatrixXd& states,
                                         const Eigen::MatrixXd& history) const {
    if (states.cols() != shape_.state_dim || history.cols() != shape_.history_dim ||
        states.rows() != history.rows())
        throw ShapeMismatch{};

    Cache c;
    c.input = states;
    c.history = history;
    const Eigen::MatrixXd* prev = &c.input;
    const size_t n_enc = layers_.size() - 1;
    c.activations.reserve(n_enc);
    for (size_t i = 0; i < n_enc; ++i) {
        Eigen::MatrixXd z = (*prev) * weight(layers_[i]).transpose();
        z.rowwise() += bias(layers_[i]).transpose();
        c.activations.push_back(z.cwiseMax(0.0));
        prev = &c.activations.back();
    }
    c.fused.resize(prev->rows(), prev->cols() + history.cols());
    c.fused << *prev, history;
    const Layer& head = layers_.back();
    c.q = c.fused * weight(head).transpose();
    c.q.rowwise() += bias(head).transpose();
    return c;
}

Eigen::MatrixXd QNetwork::forward(const Eigen::MatrixXd& states,
                                  const Eigen::MatrixXd& history) const {
    return forward_cached(states, history).q;
}

Eigen::VectorXd QNetwork::backward(const Cache& cache, const Eigen::MatrixXd& dq) const {
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(params_.size());
    const Layer& head = layers_.back();

    auto gw = [&](const Layer& l) {
        return Eigen::Map<Eigen::MatrixXd>(grad.data() + l.offset_w, l.rows, l.cols);
    };
    auto gb = [&](const Layer& l) {
        return Eigen::Map<Eigen::VectorXd>(grad.data() + l.offset_b, l.rows);
    };

    gw(head).noalias() = dq.transpose() * cache.fused;
    gb(head) = dq.colwise().sum();

    const int last = int(cache.activations.size()) - 1;
    Eigen::MatrixXd dfused = dq * weight(head);
    Eigen::MatrixXd dact = dfused.leftCols(last >= 0 ? cache.activations[last].cols() : 0);

    for (int i = last; i >= 0; --i) {
        // ReLU gate on the stored activation (zero where the unit was off)
        Eigen::MatrixXd dz =
            dact.array() * (cache.activations[i].array() > 0.0).cast<double>();
        const Eigen::MatrixXd& below = i == 0 ? cache.input : cache.activations[i - 1];
        gw(layers_[i]).noalias() = dz.transpose() * below;
        gb(layers_[i]) = dz.colwise().sum();
        if (i > 0) dact = dz * weight(layers_[i]);
    }
    return grad;
}

}  // namespace boxrefine

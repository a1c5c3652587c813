#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace boxrefine {

struct ShapeMismatch : std::runtime_error {
    ShapeMismatch() : std::runtime_error("input dimensions do not match the network") {}
};

struct NetShape {
    int state_dim = 0;                    // flattened S*S*6
    int history_dim = 150;
    std::vector<int> hidden = {256, 128}; // encoder widths
    int actions = 15;

    bool operator==(const NetShape&) const = default;
};

// Fully-connected Q-network. The state runs through the ReLU encoder,
// the history vector is concatenated onto the last hidden layer, and an
// affine head maps to one Q-value per action. Parameters live in a
// single flat vector so optimizers and finite differences can treat the
// network as a plain function of R^n.
class QNetwork {
public:
    QNetwork(NetShape shape, uint64_t seed);

    const NetShape& shape() const { return shape_; }
    int param_count() const { return int(params_.size()); }
    Eigen::VectorXd& params() { return params_; }
    const Eigen::VectorXd& params() const { return params_; }

    // states: N x state_dim, history: N x history_dim -> N x actions
    Eigen::MatrixXd forward(const Eigen::MatrixXd& states,
                            const Eigen::MatrixXd& history) const;

    struct Cache {
        Eigen::MatrixXd input;
        Eigen::MatrixXd history;
        std::vector<Eigen::MatrixXd> activations;  // post-ReLU per encoder layer
        Eigen::MatrixXd fused;                     // [last activation, history]
        Eigen::MatrixXd q;
    };

    Cache forward_cached(const Eigen::MatrixXd& states,
                         const Eigen::MatrixXd& history) const;

    // Gradient of sum_ij dq(i,j) * q(i,j) with respect to the flat
    // parameter vector.
    Eigen::VectorXd backward(const Cache& cache, const Eigen::MatrixXd& dq) const;

private:
    struct Layer {
        int offset_w, offset_b, rows, cols;
    };

    Eigen::Map<const Eigen::MatrixXd> weight(const Layer& l) const;
    Eigen::Map<const Eigen::VectorXd> bias(const Layer& l) const;

    NetShape shape_;
    std::vector<Layer> layers_;  // encoder layers then head
    Eigen::VectorXd params_;
};

}  // namespace boxrefine

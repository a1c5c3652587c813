#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "boxrefine/env.hpp"

namespace boxrefine {

// Compact stored observation: raw bytes of the two patches (image then
// mask, interleaved RGB) plus the raw recent-action slots. Expanded to
// network inputs only at batch-assembly time.
struct StoredState {
    std::vector<uint8_t> pixels;
    std::array<int, kHistoryLen> recent{};

    static StoredState from(const Observation& obs);
};

struct Transition {
    StoredState state;
    int action = 0;
    int reward = 0;
    std::optional<StoredState> next_state;  // absent at terminal
    bool terminal = false;
};

// Fixed-capacity ring with uniform without-replacement batch sampling.
class ReplayBuffer {
public:
    explicit ReplayBuffer(size_t capacity, uint64_t seed)
        : capacity_(capacity), rng_(seed) {}

    void push(Transition t);
    size_t size() const { return storage_.size(); }
    size_t capacity() const { return capacity_; }
    const Transition& at(size_t i) const { return storage_[i]; }

    std::vector<const Transition*> sample(size_t batch);

private:
    size_t capacity_;
    size_t next_ = 0;
    std::vector<Transition> storage_;
    std::mt19937_64 rng_;
};

}  // namespace boxrefine

#include "boxrefine/replay.hpp"

#include <stdexcept>

namespace boxrefine {

StoredState StoredState::from(const Observation& obs) {
    StoredState s;
    s.pixels.reserve(obs.state.patch.data.size() + obs.state.mask.data.size());
    s.pixels.insert(s.pixels.end(), obs.state.patch.data.begin(), obs.state.patch.data.end());
    s.pixels.insert(s.pixels.end(), obs.state.mask.data.begin(), obs.state.mask.data.end());
    s.recent = obs.recent;
    return s;
}

void ReplayBuffer::push(Transition t) {
    if (storage_.size() < capacity_) {
        storage_.push_back(std::move(t));
    } else {
        storage_[next_] = std::move(t);
    }
    next_ = (next_ + 1) % capacity_;
}

std::vector<const Transition*> ReplayBuffer::sample(size_t batch) {
    if (batch > storage_.size())
        throw std::runtime_error("replay buffer smaller than requested batch");
    // partial Fisher-Yates: first `batch` slots become a uniform draw
    // without replacement
    std::vector<size_t> idx(storage_.size());
    for (size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::vector<const Transition*> out;
    out.reserve(batch);
    for (size_t k = 0; k < batch; ++k) {
        std::uniform_int_distribution<size_t> pick(k, idx.size() - 1);
        std::swap(idx[k], idx[pick(rng_)]);
        out.push_back(&storage_[idx[k]]);
    }
    return out;
}

}  // namespace boxrefine

#include "aa/history.hpp"

#include <stdexcept>
#include <string>

namespace aa {

IterationHistory::IterationHistory(int depth_m) : capacity_(depth_m + 1) {
    if (depth_m < 0) {
        throw std::invalid_argument("IterationHistory: depth must be >= 0, got " +
                                    std::to_string(depth_m));
    }
    ring_.resize(static_cast<std::size_t>(capacity_));
}

void IterationHistory::push(Vector x, Vector g_value, Vector residual) {
    int slot;
    if (count_ < capacity_) {
        slot = (start_ + count_) % capacity_;
        ++count_;
    } else {
        slot = start_;
        start_ = (start_ + 1) % capacity_;
    }
    auto& e = ring_[static_cast<std::size_t>(slot)];
    e.x = std::move(x);
    e.g_value = std::move(g_value);
    e.residual = std::move(residual);
    ++pushes_;
}

void IterationHistory::clear() {
    start_ = 0;
    count_ = 0;
    pushes_ = 0;
    last_alphas.clear();
    last_gammas.clear();
    last_theta = 1.0;
    last_beta = 1.0;
}

} // namespace aa

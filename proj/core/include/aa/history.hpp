#ifndef AA_HISTORY_HPP
#define AA_HISTORY_HPP

#include <vector>

#include "aa/vec.hpp"

namespace aa {

/// Ring buffer over the last m+1 iteration triples (x_j, x~_{j+1}, w_{j+1}),
/// plus the coefficients of the most recent mixing step.
///
/// Entry i (i = 0 oldest .. size()-1 newest) stores the iterate x_j, the
/// evaluation x~_{j+1} = g(x_j) and the residual w_{j+1} = x~_{j+1} - x_j.
class IterationHistory {
public:
    explicit IterationHistory(int depth_m);

    void push(Vector x, Vector g_value, Vector residual);
    void clear();

    /// Entries currently stored (at most depth_m + 1).
    int size() const { return count_; }
    /// Total number of pushes over the run.
    long long steps_seen() const { return pushes_; }
    int depth() const { return capacity_ - 1; }

    const Vector& iterate(int i) const { return entry(i).x; }
    const Vector& g_value(int i) const { return entry(i).g_value; }
    const Vector& residual(int i) const { return entry(i).residual; }

    // Most recent mixing coefficients; empty / defaults before the first
    // accelerated step.
    std::vector<double> last_alphas;
    std::vector<double> last_gammas;
    double last_theta = 1.0;
    double last_beta = 1.0;

private:
    struct Entry {
        Vector x;
        Vector g_value;
        Vector residual;
    };

    const Entry& entry(int i) const { return ring_[static_cast<std::size_t>((start_ + i) % capacity_)]; }

    int capacity_;
    int start_ = 0;
    int count_ = 0;
    long long pushes_ = 0;
    std::vector<Entry> ring_;
};

} // namespace aa

#endif // AA_HISTORY_HPP

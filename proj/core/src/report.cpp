#include "aa/report.hpp"

namespace aa {

std::string_view to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::Converged: return "converged";
        case SolveStatus::Diverged: return "diverged";
        case SolveStatus::MaxIters: return "max_iters";
        case SolveStatus::NonFinite: return "non_finite";
    }
    return "unknown";
}

std::string_view to_string(RateClassification c) {
    switch (c) {
        case RateClassification::Linear: return "linear";
        case RateClassification::Superlinear: return "superlinear";
        case RateClassification::Quadratic: return "quadratic";
        case RateClassification::Stagnant: return "stagnant";
        case RateClassification::Divergent: return "divergent";
    }
    return "unknown";
}

std::vector<double> SolveReport::residual_norms() const {
    std::vector<double> out;
    out.reserve(steps.size());
    for (const auto& s : steps) {
        out.push_back(s.residual_norm);
    }
    return out;
}

} // namespace aa

#ifndef AA_REPORT_HPP
#define AA_REPORT_HPP

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "aa/config.hpp"
#include "aa/vec.hpp"

namespace aa {

enum class SolveStatus {
    Converged,
    Diverged,  // divergence guard tripped
    MaxIters,
    NonFinite, // g produced NaN/Inf
};

std::string_view to_string(SolveStatus s);

enum class RateClassification {
    Linear,
    Superlinear,
    Quadratic,
    Stagnant,
    Divergent,
};

std::string_view to_string(RateClassification c);

/// Least-squares fit of the residual decay over an iteration window.
struct RateEstimate {
    double fitted_rate = 0.0;            // rho = exp(slope of log residuals)
    std::pair<int, int> window{0, 0};    // half-open [begin, end)
    double r_squared = 0.0;
    RateClassification classification = RateClassification::Linear;
};

/// Record of one driver step k (the transition x_k -> x_{k+1}).
struct StepReport {
    int k = 0;
    double residual_norm = 0.0;       // ||w_{k+1}|| = ||g(x_k) - x_k||
    double theta = 1.0;               // gain, clamped into [0,1]
    double theta_raw = 1.0;           // gain before clamping
    double beta = 1.0;                // damping factor actually applied
    std::vector<double> alpha;        // m_k+1 coefficients; empty when no
                                      // optimization was posed (step 0,
                                      // converged stop, guard trip)
    std::vector<double> gamma;        // m_k unconstrained coefficients
    int depth_used = 0;               // m_k
    double mixed_residual_norm = 0.0; // ||w^alpha_{k+1}||, clamped <= residual_norm
    Vector accepted;                  // x_{k+1}
    Vector residual;                  // w_{k+1}
};

/// Full trace of one solve run.
struct SolveReport {
    std::string problem_name;
    int dimension = 0;
    AndersonConfig config{};
    Vector x0;
    std::vector<StepReport> steps;
    SolveStatus status = SolveStatus::MaxIters;
    std::optional<RateEstimate> rate; // absent when fewer than 5 residuals
    int clamp_warnings = 0; // steps whose raw gain left [0, 1] by more than 1e-12
    InnerProduct inner_product = euclidean_inner_product(); // geometry the run used

    int iterations() const { return static_cast<int>(steps.size()); }
    const Vector& final_iterate() const { return steps.empty() ? x0 : steps.back().accepted; }
    double final_residual_norm() const { return steps.empty() ? 0.0 : steps.back().residual_norm; }
    std::vector<double> residual_norms() const;

    /// x_s, the iterate at which step s was taken.
    const Vector& iterate_before_step(int s) const { return s == 0 ? x0 : steps[static_cast<std::size_t>(s) - 1].accepted; }

    std::optional<RateClassification> classification() const {
        if (!rate) return std::nullopt;
        return rate->classification;
    }
};

} // namespace aa

#endif // AA_REPORT_HPP

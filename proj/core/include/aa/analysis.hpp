#ifndef AA_ANALYSIS_HPP
#define AA_ANALYSIS_HPP

#include <optional>
#include <span>
#include <string>

#include "aa/report.hpp"

namespace aa::analysis {

/// Outcome of a named runtime check over a solve trace.
struct AuditResult {
    std::string name;
    double worst_deviation = 0.0;
    double tolerance = 0.0;
    bool passed = false; // worst_deviation <= tolerance
    int location = -1;   // step index of the worst case, -1 if none
    std::optional<double> fitted_constant; // rate-envelope audits only
};

/// Verifies, at every step with depth_used >= 1, the exact update identity
///   sum_j gamma_j e_j = x_{k} - x^alpha_{k-1} = beta_{k-1} w^alpha_k
/// recomputed from the stored iterates, residuals and coefficients.
/// Deviations are measured relative to the magnitude of the inputs.
/// Tolerance 1e-10.  Throws InsufficientHistoryError when the trace has no
/// mixed step or lacks stored vectors.
AuditResult audit_update_identity(const SolveReport& trace);

/// Checks theta_k in [-1e-12, 1 + 1e-12] and
/// mixed_residual_norm <= residual_norm * (1 + 1e-12) at every step.
AuditResult audit_gain_bound(const SolveReport& trace);

/// Depth-1 coefficient bounds under a contraction constant kappa < 1:
///   |alpha^j_{j-1}| ||e_{j-1}|| <= (1-kappa)^{-1} ||w_{j-1}||
///   |alpha^j_{j-2}| ||e_{j-1}|| <= (1-kappa)^{-1} ||w_j||
/// at every depth-1 step, with multiplicative slack 1 + 1e-8.
/// Throws NotContractiveError when kappa >= 1, InsufficientHistoryError when
/// the trace has no depth-1 step or lacks stored vectors.
AuditResult audit_lemma_m1(const SolveReport& trace, double kappa);

/// Residual envelope: per-step slack
///   s = ||w_{k+1}|| - theta ((1-beta) + kappa beta) ||w_k||
/// with theta, beta taken from the step that produced x_k.  When
/// fit_constant, fits the smallest C >= 0 with s <= C * sum_{j=0..m} ||w_{k-j}||^2
/// over the trailing 80% of the trace and reports it; otherwise requires the
/// first-order bound alone (C = 0).  Throws NotContractiveError when
/// kappa >= 1, InsufficientHistoryError for depth-0 traces.
AuditResult audit_rate_envelope(const SolveReport& trace, double kappa,
                                bool fit_constant);

/// Fits rho = exp(slope) to the log residuals over the half-open window
/// [begin, end) and classifies the decay.  Requires at least 5 residuals in
/// the window; throws NonPositiveResidualError when any of them is <= 0.
RateEstimate estimate_rate(std::span<const double> residual_norms, int begin, int end);

/// Convenience overload over the full sequence.
RateEstimate estimate_rate(std::span<const double> residual_norms);

/// Largest Lipschitz quotient ||g(x_k) - g(x_{k-1})|| / ||x_k - x_{k-1}||
/// along the trajectory; a lower bound on the true constant.  Throws
/// DegenerateStepError when consecutive iterates coincide,
/// InsufficientHistoryError for traces with fewer than 3 iterates.
double estimate_kappa(const SolveReport& trace);

} // namespace aa::analysis

#endif // AA_ANALYSIS_HPP

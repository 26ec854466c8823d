#ifndef AA_SOLVER_HPP
#define AA_SOLVER_HPP

#include <span>
#include <utility>
#include <vector>

#include "aa/config.hpp"
#include "aa/history.hpp"
#include "aa/linalg.hpp"
#include "aa/problem.hpp"
#include "aa/report.hpp"
#include "aa/vec.hpp"

namespace aa {

/// Solution of the unconstrained gamma-form mixing problem
///   min_gamma || w_{k+1} - F gamma ||
/// where F has columns w_{n+1} - w_n over the residual window.
struct MixingResult {
    std::vector<double> gamma;        // one slot per window difference; dropped
                                      // columns keep gamma = 0
    double theta = 1.0;               // clamped into [0,1]
    double theta_raw = 1.0;           // achieved_norm / ||w||, unclamped
    double mixed_residual_norm = 0.0; // clamped so it never exceeds ||w||
    Vector mixed_residual;            // w - F gamma, recomputed explicitly
};

/// residual_window holds w_{k-m_k+1}, ..., w_{k+1} (at least two vectors).
/// Degenerate columns are dropped per rank_drop_tol; if every column drops,
/// gamma = 0 and theta = 1.  theta is defined as 0 when ||w_{k+1}|| = 0.
/// When the solved coefficients exceed coefficient_cap in magnitude, the
/// window is shrunk from its oldest column until they are bounded (their
/// gamma slots stay 0); past the cap the coefficients are rounding noise and
/// would break the sum-to-one identity of the alpha form.
MixingResult solve_mixing_ls(std::span<const Vector> residual_window,
                             const InnerProduct& ip, double rank_drop_tol = 1e-10,
                             double coefficient_cap = 250.0);

/// Inverts the cumulative-sum relation between the unconstrained gamma
/// coefficients and the sum-to-one alpha coefficients:
///   alpha_0 = gamma_0, alpha_t = gamma_t - gamma_{t-1}, alpha_m = 1 - gamma_{m-1}.
std::vector<double> gamma_to_alpha(std::span<const double> gamma);

/// Direction-sine of w against the span of an orthonormal basis:
/// sqrt(1 - ||Q^T w||^2 / ||w||^2), clamped into [0,1].  An empty basis gives 1.
/// Throws ZeroResidualError when ||w|| = 0.
double compute_gain(const linalg::DenseMatrix& q_basis, const Vector& w,
                    const InnerProduct& ip);

/// One accelerated step: evaluates g(x_k), solves the mixing problem over the
/// history window, and forms the damped update per the current schedule.
/// Requires at least one prior entry in the history.  Throws NonFiniteError
/// when g produces NaN/Inf.  When the residual is already at tolerance or
/// beyond the divergence guard, returns without mixing (the driver stops).
std::pair<Vector, StepReport> anderson_step(const FixedPointProblem& problem,
                                            IterationHistory& history,
                                            const Vector& x_k,
                                            const AndersonConfig& config);

/// Plain (depth 0) fixed-point driver x_{k+1} = (1-beta_k) x_k + beta_k g(x_k),
/// with the first step always undamped.  Requires config.depth_m == 0.
SolveReport fixed_point_iterate(const FixedPointProblem& problem, const Vector& x0,
                                const AndersonConfig& config);

/// Anderson-accelerated driver for any depth m >= 0.  With depth 0 and
/// constant beta = 1 the trace is bit-identical to fixed_point_iterate.
SolveReport solve(const FixedPointProblem& problem, const Vector& x0,
                  const AndersonConfig& config);

} // namespace aa

#endif // AA_SOLVER_HPP

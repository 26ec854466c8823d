#include "aa/solver.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "aa/analysis.hpp"
#include "aa/errors.hpp"

namespace aa {

double beta_schedule(const DampingSchedule& schedule, double theta_k) {
    if (schedule.kind == DampingSchedule::Kind::Constant) {
        return schedule.beta;
    }
    return 1.0 - theta_k / 2.0;
}

void AndersonConfig::validate() const {
    if (depth_m < 0) {
        throw std::invalid_argument("AndersonConfig: depth_m must be >= 0, got " +
                                    std::to_string(depth_m));
    }
    if (!(residual_tol > 0.0)) {
        throw std::invalid_argument("AndersonConfig: residual_tol must be positive");
    }
    if (!(divergence_guard > 0.0) || !(residual_tol < divergence_guard)) {
        throw std::invalid_argument("AndersonConfig: requires residual_tol < divergence_guard");
    }
    if (max_iters < 1) {
        throw std::invalid_argument("AndersonConfig: max_iters must be >= 1");
    }
    if (!(rank_drop_tol > 0.0)) {
        throw std::invalid_argument("AndersonConfig: rank_drop_tol must be positive");
    }
    if (damping.kind == DampingSchedule::Kind::Constant &&
        !(damping.beta > 0.0 && damping.beta <= 1.0)) {
        throw std::invalid_argument("AndersonConfig: constant damping beta must lie in (0, 1]");
    }
}

MixingResult solve_mixing_ls(std::span<const Vector> residual_window,
                             const InnerProduct& ip, double rank_drop_tol,
                             double coefficient_cap) {
    if (residual_window.size() < 2) {
        throw std::invalid_argument("solve_mixing_ls: window must hold at least 2 residuals");
    }
    const Vector& w = residual_window.back();
    const int n = static_cast<int>(w.size());
    const int m = static_cast<int>(residual_window.size()) - 1;

    MixingResult res;
    res.gamma.assign(static_cast<std::size_t>(m), 0.0);

    const double w_norm = norm(ip, w);

    linalg::DenseMatrix f(n, m);
    for (int t = 0; t < m; ++t) {
        auto col = f.col(t);
        const Vector& hi = residual_window[static_cast<std::size_t>(t) + 1];
        const Vector& lo = residual_window[static_cast<std::size_t>(t)];
        for (int i = 0; i < n; ++i) {
            col[static_cast<std::size_t>(i)] = hi[static_cast<std::size_t>(i)] - lo[static_cast<std::size_t>(i)];
        }
    }

    // Shrink the window from the oldest column while the coefficients exceed
    // the cap.  Unbounded coefficients amplify rounding past the sum-to-one
    // tolerance and carry no usable direction information.
    for (int skip = 0; skip <= m; ++skip) {
        std::fill(res.gamma.begin(), res.gamma.end(), 0.0);
        const int mm = m - skip;
        if (mm == 0) {
            break;
        }
        linalg::DenseMatrix f_sub(n, mm);
        for (int t = 0; t < mm; ++t) {
            std::copy(f.col(t + skip).begin(), f.col(t + skip).end(), f_sub.col(t).begin());
        }
        const auto qr = linalg::economy_qr(f_sub, ip, rank_drop_tol);
        if (qr.kept_columns.empty()) {
            break; // every column degenerate: gamma = 0, theta = 1
        }
        const auto ls = linalg::least_squares(qr.q, qr.r, w, ip);
        double largest = 0.0;
        for (double c : ls.coefficients) {
            largest = std::max(largest, std::abs(c));
        }
        if (largest <= coefficient_cap) {
            for (std::size_t i = 0; i < qr.kept_columns.size(); ++i) {
                res.gamma[static_cast<std::size_t>(skip + qr.kept_columns[i])] = ls.coefficients[i];
            }
            break;
        }
    }

    // The gain comes from the explicitly recomputed mixed residual, not the
    // projection identity: near theta = 0 the identity loses half the digits
    // to cancellation while the recomputed form stays at rounding level.
    res.mixed_residual = w;
    for (int t = 0; t < m; ++t) {
        const double g = res.gamma[static_cast<std::size_t>(t)];
        if (g == 0.0) continue;
        auto col = f.col(t);
        for (int i = 0; i < n; ++i) {
            res.mixed_residual[static_cast<std::size_t>(i)] -= g * col[static_cast<std::size_t>(i)];
        }
    }
    const double achieved = norm(ip, res.mixed_residual);
    res.theta_raw = (w_norm == 0.0) ? 0.0 : achieved / w_norm;
    res.mixed_residual_norm = std::min(achieved, w_norm);
    res.theta = std::clamp(res.theta_raw, 0.0, 1.0);
    return res;
}

std::vector<double> gamma_to_alpha(std::span<const double> gamma) {
    const std::size_t m = gamma.size();
    std::vector<double> alpha(m + 1, 0.0);
    if (m == 0) {
        alpha[0] = 1.0;
        return alpha;
    }
    alpha[0] = gamma[0];
    for (std::size_t t = 1; t < m; ++t) {
        alpha[t] = gamma[t] - gamma[t - 1];
    }
    alpha[m] = 1.0 - gamma[m - 1];
    return alpha;
}

double compute_gain(const linalg::DenseMatrix& q_basis, const Vector& w,
                    const InnerProduct& ip) {
    const double w_norm_sq = ip(w, w);
    if (w_norm_sq == 0.0) {
        throw ZeroResidualError("compute_gain: residual norm is zero");
    }
    if (q_basis.cols == 0) {
        return 1.0;
    }
    double proj_sq = 0.0;
    for (int i = 0; i < q_basis.cols; ++i) {
        const double c = ip(q_basis.col(i), w);
        proj_sq += c * c;
    }
    const double ratio = 1.0 - proj_sq / w_norm_sq;
    return std::sqrt(std::clamp(ratio, 0.0, 1.0));
}

namespace {

StepReport make_base_step(int k, double residual_norm, Vector residual) {
    StepReport step;
    step.k = k;
    step.residual_norm = residual_norm;
    step.residual = std::move(residual);
    return step;
}

int window_depth(const AndersonConfig& config, int history_size) {
    if (config.history_policy == HistoryPolicy::TruncateMinKM) {
        return std::min(history_size, config.depth_m);
    }
    return history_size >= config.depth_m ? config.depth_m : 0;
}

} // namespace

std::pair<Vector, StepReport> anderson_step(const FixedPointProblem& problem,
                                            IterationHistory& history,
                                            const Vector& x_k,
                                            const AndersonConfig& config) {
    if (history.size() < 1) {
        throw std::invalid_argument("anderson_step: history holds no prior residual");
    }
    const InnerProduct& ip = problem.inner_product;
    const int n = problem.dimension;
    const int k = static_cast<int>(history.steps_seen());

    Vector x_tilde = problem.eval_g(x_k);
    if (static_cast<int>(x_tilde.size()) != n) {
        throw std::invalid_argument("anderson_step: eval_g returned dimension " +
                                    std::to_string(x_tilde.size()) + ", expected " +
                                    std::to_string(n));
    }
    if (!all_finite(x_tilde)) {
        throw NonFiniteError("anderson_step: g produced NaN/Inf at iteration " + std::to_string(k));
    }

    Vector w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        w[static_cast<std::size_t>(i)] = x_tilde[static_cast<std::size_t>(i)] - x_k[static_cast<std::size_t>(i)];
    }
    const double rn = norm(ip, w);
    if (!std::isfinite(rn)) {
        throw NonFiniteError("anderson_step: residual norm overflowed at iteration " + std::to_string(k));
    }

    // Residual already at tolerance: report theta = 0 and stop before mixing.
    if (rn <= config.residual_tol) {
        StepReport step = make_base_step(k, rn, std::move(w));
        step.theta = step.theta_raw = 0.0;
        step.beta = 1.0;
        step.mixed_residual_norm = rn;
        step.accepted = x_tilde;
        return {std::move(x_tilde), std::move(step)};
    }

    // Beyond the divergence guard: no update, the driver aborts.
    if (rn > config.divergence_guard) {
        StepReport step = make_base_step(k, rn, std::move(w));
        step.theta = step.theta_raw = 1.0;
        step.beta = 1.0;
        step.mixed_residual_norm = rn;
        step.accepted = x_k;
        return {x_k, std::move(step)};
    }

    const int m_k = window_depth(config, history.size());
    StepReport step = make_base_step(k, rn, w);
    step.depth_used = m_k;

    Vector x_next;
    if (m_k == 0) {
        step.theta = step.theta_raw = 1.0;
        step.beta = beta_schedule(config.damping, 1.0);
        step.alpha = {1.0};
        step.mixed_residual_norm = rn;
        x_next = damped_combination(x_k, x_tilde, step.beta);
    } else {
        std::vector<Vector> window;
        window.reserve(static_cast<std::size_t>(m_k) + 1);
        for (int i = history.size() - m_k; i < history.size(); ++i) {
            window.push_back(history.residual(i));
        }
        window.push_back(w);

        MixingResult mix = solve_mixing_ls(window, ip, config.rank_drop_tol);
        step.theta = mix.theta;
        step.theta_raw = mix.theta_raw;
        step.beta = beta_schedule(config.damping, mix.theta);
        step.gamma = mix.gamma;
        step.alpha = gamma_to_alpha(mix.gamma);
        step.mixed_residual_norm = mix.mixed_residual_norm;

        // x~^alpha = sum_j alpha_j g(x_j) over the window, oldest first.
        Vector x_tilde_avg(static_cast<std::size_t>(n), 0.0);
        auto accumulate = [n](Vector& acc, double c, const Vector& v) {
            for (int i = 0; i < n; ++i) {
                acc[static_cast<std::size_t>(i)] += c * v[static_cast<std::size_t>(i)];
            }
        };
        for (int i = 0; i < m_k; ++i) {
            accumulate(x_tilde_avg, step.alpha[static_cast<std::size_t>(i)],
                       history.g_value(history.size() - m_k + i));
        }
        accumulate(x_tilde_avg, step.alpha[static_cast<std::size_t>(m_k)], x_tilde);

        if (step.beta == 1.0) {
            x_next = std::move(x_tilde_avg); // the x^alpha term drops
        } else {
            Vector x_avg(static_cast<std::size_t>(n), 0.0);
            for (int i = 0; i < m_k; ++i) {
                accumulate(x_avg, step.alpha[static_cast<std::size_t>(i)],
                           history.iterate(history.size() - m_k + i));
            }
            accumulate(x_avg, step.alpha[static_cast<std::size_t>(m_k)], x_k);
            x_next = damped_combination(x_avg, x_tilde_avg, step.beta);
        }
    }

    history.push(x_k, std::move(x_tilde), std::move(w));
    history.last_alphas = step.alpha;
    history.last_gammas = step.gamma;
    history.last_theta = step.theta;
    history.last_beta = step.beta;

    step.accepted = x_next;
    return {std::move(x_next), std::move(step)};
}

namespace {

void validate_start(const FixedPointProblem& problem, const Vector& x0) {
    if (problem.dimension <= 0) {
        throw std::invalid_argument("solve: problem dimension must be positive");
    }
    if (static_cast<int>(x0.size()) != problem.dimension) {
        throw std::invalid_argument("solve: x0 has " + std::to_string(x0.size()) +
                                    " entries, expected " + std::to_string(problem.dimension));
    }
    if (!all_finite(x0)) {
        throw std::invalid_argument("solve: x0 must be finite");
    }
}

void attach_rate(SolveReport& report) {
    std::vector<double> r;
    for (const auto& s : report.steps) {
        if (!(s.residual_norm > 0.0)) break;
        r.push_back(s.residual_norm);
    }
    if (r.size() >= 5) {
        report.rate = analysis::estimate_rate(r, 0, static_cast<int>(r.size()));
    }
}

SolveReport make_report_shell(const FixedPointProblem& problem, const Vector& x0,
                              const AndersonConfig& config) {
    SolveReport report;
    report.problem_name = problem.metadata.name;
    report.dimension = problem.dimension;
    report.config = config;
    report.x0 = x0;
    report.inner_product = problem.inner_product;
    report.status = SolveStatus::MaxIters;
    return report;
}

} // namespace

SolveReport fixed_point_iterate(const FixedPointProblem& problem, const Vector& x0,
                                const AndersonConfig& config) {
    config.validate();
    if (config.depth_m != 0) {
        throw std::invalid_argument("fixed_point_iterate: requires depth_m == 0, got " +
                                    std::to_string(config.depth_m));
    }
    validate_start(problem, x0);

    SolveReport report = make_report_shell(problem, x0, config);
    const InnerProduct& ip = problem.inner_product;
    const int n = problem.dimension;
    Vector x = x0;

    for (int k = 0; k < config.max_iters; ++k) {
        Vector x_tilde = problem.eval_g(x);
        if (static_cast<int>(x_tilde.size()) != n || !all_finite(x_tilde)) {
            report.status = SolveStatus::NonFinite;
            break;
        }
        Vector w(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            w[static_cast<std::size_t>(i)] = x_tilde[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)];
        }
        const double rn = norm(ip, w);
        if (!std::isfinite(rn)) {
            report.status = SolveStatus::NonFinite;
            break;
        }

        StepReport step = make_base_step(k, rn, std::move(w));
        if (rn <= config.residual_tol) {
            step.theta = step.theta_raw = 0.0;
            step.beta = 1.0;
            step.mixed_residual_norm = rn;
            step.accepted = std::move(x_tilde);
            report.steps.push_back(std::move(step));
            report.status = SolveStatus::Converged;
            break;
        }
        if (rn > config.divergence_guard) {
            step.theta = step.theta_raw = 1.0;
            step.beta = 1.0;
            step.mixed_residual_norm = rn;
            step.accepted = x;
            report.steps.push_back(std::move(step));
            report.status = SolveStatus::Diverged;
            break;
        }

        // Step 1 is always undamped; damping enters from k >= 1.
        step.theta = step.theta_raw = 1.0;
        step.beta = (k == 0) ? 1.0 : beta_schedule(config.damping, 1.0);
        if (k > 0) {
            step.alpha = {1.0};
        }
        step.mixed_residual_norm = rn;
        Vector x_next = damped_combination(x, x_tilde, step.beta);
        step.accepted = x_next;
        report.steps.push_back(std::move(step));
        x = std::move(x_next);
    }

    attach_rate(report);
    return report;
}

SolveReport solve(const FixedPointProblem& problem, const Vector& x0,
                  const AndersonConfig& config) {
    config.validate();
    validate_start(problem, x0);

    SolveReport report = make_report_shell(problem, x0, config);
    const InnerProduct& ip = problem.inner_product;
    const int n = problem.dimension;

    IterationHistory history(config.depth_m);
    Vector x = x0;

    for (int k = 0; k < config.max_iters; ++k) {
        if (k == 0) {
            Vector x_tilde = problem.eval_g(x);
            if (static_cast<int>(x_tilde.size()) != n || !all_finite(x_tilde)) {
                report.status = SolveStatus::NonFinite;
                break;
            }
            Vector w(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) {
                w[static_cast<std::size_t>(i)] = x_tilde[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(i)];
            }
            const double rn = norm(ip, w);
            if (!std::isfinite(rn)) {
                report.status = SolveStatus::NonFinite;
                break;
            }
            StepReport step = make_base_step(0, rn, w);
            if (rn <= config.residual_tol) {
                step.theta = step.theta_raw = 0.0;
                step.beta = 1.0;
                step.mixed_residual_norm = rn;
                step.accepted = std::move(x_tilde);
                report.steps.push_back(std::move(step));
                report.status = SolveStatus::Converged;
                break;
            }
            if (rn > config.divergence_guard) {
                step.theta = step.theta_raw = 1.0;
                step.beta = 1.0;
                step.mixed_residual_norm = rn;
                step.accepted = x;
                report.steps.push_back(std::move(step));
                report.status = SolveStatus::Diverged;
                break;
            }
            // Step 1: x_1 = x~_1, always undamped.
            step.theta = step.theta_raw = 1.0;
            step.beta = 1.0;
            step.mixed_residual_norm = rn;
            step.accepted = x_tilde;
            report.steps.push_back(std::move(step));
            history.push(std::move(x), std::move(x_tilde), std::move(w));
            x = report.steps.back().accepted;
            continue;
        }

        std::pair<Vector, StepReport> result;
        try {
            result = anderson_step(problem, history, x, config);
        } catch (const NonFiniteError&) {
            report.status = SolveStatus::NonFinite;
            break;
        }
        StepReport& step = result.second;
        if (step.theta_raw > 1.0 + 1e-12 || step.theta_raw < -1e-12) {
            ++report.clamp_warnings;
        }
        const double rn = step.residual_norm;
        report.steps.push_back(std::move(step));
        if (rn <= config.residual_tol) {
            report.status = SolveStatus::Converged;
            break;
        }
        if (rn > config.divergence_guard) {
            report.status = SolveStatus::Diverged;
            break;
        }
        x = std::move(result.first);
    }

    attach_rate(report);
    return report;
}

} // namespace aa

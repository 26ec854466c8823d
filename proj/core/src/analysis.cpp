#include "aa/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "aa/errors.hpp"

namespace aa::analysis {

namespace {

bool has_vectors(const SolveReport& t) {
    for (const auto& s : t.steps) {
        if (s.accepted.empty() || s.residual.empty()) {
            return false;
        }
    }
    return !t.steps.empty() && !t.x0.empty();
}

Vector diff(const Vector& a, const Vector& b) {
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = a[i] - b[i];
    }
    return out;
}

void axpy(Vector& acc, double c, const Vector& v) {
    for (std::size_t i = 0; i < acc.size(); ++i) {
        acc[i] += c * v[i];
    }
}

RateClassification classify(std::span<const double> r, double rho) {
    const std::size_t n = r.size();

    if (r[n - 1] > 10.0 * r[0]) {
        return RateClassification::Divergent;
    }

    double mean_log = 0.0;
    for (double x : r) mean_log += std::log(x);
    mean_log /= static_cast<double>(n);
    double var_log = 0.0;
    for (double x : r) {
        const double d = std::log(x) - mean_log;
        var_log += d * d;
    }
    var_log /= static_cast<double>(n);
    if (rho > 0.995 && rho < 1.005 && std::sqrt(var_log) < 0.1) {
        return RateClassification::Stagnant;
    }

    // Quadratic decay doubles the number of correct digits per step, so the
    // tail log-residual ratios settle near 2; the tail is used because early
    // ratios are transient-dominated.
    std::vector<double> log_ratios;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        if (r[i] < 1.0 && r[i + 1] < 1.0) {
            log_ratios.push_back(std::log(r[i + 1]) / std::log(r[i]));
        }
    }
    if (log_ratios.size() >= 2) {
        const std::size_t take = std::min<std::size_t>(3, log_ratios.size());
        double mean = 0.0;
        for (std::size_t i = log_ratios.size() - take; i < log_ratios.size(); ++i) {
            mean += log_ratios[i];
        }
        mean /= static_cast<double>(take);
        if (mean >= 1.8) {
            return RateClassification::Quadratic;
        }
    }

    std::vector<double> q;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        q.push_back(r[i + 1] / r[i]);
    }
    bool decreasing = true;
    for (std::size_t i = 1; i < q.size(); ++i) {
        if (q[i] > 1.05 * q[i - 1]) {
            decreasing = false;
            break;
        }
    }
    if (decreasing && q.back() < 0.5 * q.front()) {
        return RateClassification::Superlinear;
    }

    return RateClassification::Linear;
}

} // namespace

RateEstimate estimate_rate(std::span<const double> residual_norms, int begin, int end) {
    if (begin < 0 || end > static_cast<int>(residual_norms.size()) || begin >= end) {
        throw std::invalid_argument("estimate_rate: bad window [" + std::to_string(begin) +
                                    ", " + std::to_string(end) + ")");
    }
    const int n = end - begin;
    if (n < 5) {
        throw std::invalid_argument("estimate_rate: window holds " + std::to_string(n) +
                                    " residuals, need at least 5");
    }
    for (int i = begin; i < end; ++i) {
        if (!(residual_norms[static_cast<std::size_t>(i)] > 0.0)) {
            throw NonPositiveResidualError("estimate_rate: non-positive residual at index " +
                                           std::to_string(i));
        }
    }

    // Least-squares line through (i, log r_i).
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = begin; i < end; ++i) {
        const double x = static_cast<double>(i);
        const double y = std::log(residual_norms[static_cast<std::size_t>(i)]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double nn = static_cast<double>(n);
    const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    const double intercept = (sy - slope * sx) / nn;

    double ss_res = 0, ss_tot = 0;
    const double y_mean = sy / nn;
    for (int i = begin; i < end; ++i) {
        const double y = std::log(residual_norms[static_cast<std::size_t>(i)]);
        const double fit = slope * static_cast<double>(i) + intercept;
        ss_res += (y - fit) * (y - fit);
        ss_tot += (y - y_mean) * (y - y_mean);
    }

    RateEstimate est;
    est.fitted_rate = std::exp(slope);
    est.window = {begin, end};
    est.r_squared = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
    est.classification = classify(residual_norms.subspan(static_cast<std::size_t>(begin),
                                                         static_cast<std::size_t>(n)),
                                  est.fitted_rate);
    return est;
}

RateEstimate estimate_rate(std::span<const double> residual_norms) {
    return estimate_rate(residual_norms, 0, static_cast<int>(residual_norms.size()));
}

double estimate_kappa(const SolveReport& trace) {
    if (trace.steps.size() < 2) {
        throw InsufficientHistoryError("estimate_kappa: needs at least 3 iterates");
    }
    if (!has_vectors(trace)) {
        throw InsufficientHistoryError("estimate_kappa: trace lacks stored vectors");
    }
    const InnerProduct& ip = trace.inner_product;
    double best = 0.0;
    for (std::size_t k = 1; k < trace.steps.size(); ++k) {
        const Vector& x_cur = trace.iterate_before_step(static_cast<int>(k));
        const Vector& x_prev = trace.iterate_before_step(static_cast<int>(k) - 1);
        const Vector e = diff(x_cur, x_prev);
        const double en = norm(ip, e);
        if (en == 0.0) {
            throw DegenerateStepError("estimate_kappa: iterates " + std::to_string(k - 1) +
                                      " and " + std::to_string(k) + " coincide");
        }
        // g(x_k) = x_k + w_{k+1}
        Vector ge = diff(trace.steps[k].residual, trace.steps[k - 1].residual);
        axpy(ge, 1.0, e);
        best = std::max(best, norm(ip, ge) / en);
    }
    return best;
}

AuditResult audit_update_identity(const SolveReport& trace) {
    AuditResult res;
    res.name = "update_identity";
    res.tolerance = 1e-10;
    if (trace.config.depth_m < 1) {
        throw InsufficientHistoryError("update_identity: depth-0 trace has no mixing coefficients");
    }
    if (!has_vectors(trace)) {
        throw InsufficientHistoryError("update_identity: trace lacks stored vectors");
    }
    const InnerProduct& ip = trace.inner_product;

    int audited = 0;
    for (std::size_t s = 0; s < trace.steps.size(); ++s) {
        const StepReport& step = trace.steps[s];
        const int mk = step.depth_used;
        if (mk < 1 || step.alpha.empty() || mk > static_cast<int>(s)) {
            continue;
        }

        // gamma_j recomputed as partial sums of alpha, with gamma_{s+1} = 1.
        std::vector<double> gam(static_cast<std::size_t>(mk) + 1, 0.0);
        double acc = 0.0;
        for (int i = 0; i < mk; ++i) {
            acc += step.alpha[static_cast<std::size_t>(i)];
            gam[static_cast<std::size_t>(i)] = acc;
        }
        gam[static_cast<std::size_t>(mk)] = 1.0;

        const int n = static_cast<int>(step.accepted.size());
        Vector lhs(static_cast<std::size_t>(n), 0.0);   // sum gamma_j e_j
        double lhs_scale = 0.0;
        for (int i = 0; i <= mk; ++i) {
            const int j = static_cast<int>(s) + 1 - mk + i; // e_j = x_j - x_{j-1}
            const Vector& xj = (j == static_cast<int>(s) + 1)
                                   ? step.accepted
                                   : trace.iterate_before_step(j);
            const Vector e = diff(xj, trace.iterate_before_step(j - 1));
            axpy(lhs, gam[static_cast<std::size_t>(i)], e);
            lhs_scale += std::abs(gam[static_cast<std::size_t>(i)]) * norm(ip, e);
        }

        Vector x_avg(static_cast<std::size_t>(n), 0.0);
        Vector w_avg(static_cast<std::size_t>(n), 0.0);
        double x_scale = norm(ip, step.accepted);
        double w_scale = 0.0;
        for (int i = 0; i <= mk; ++i) {
            const int j = static_cast<int>(s) - mk + i;
            const double a = step.alpha[static_cast<std::size_t>(i)];
            const Vector& xj = trace.iterate_before_step(j);
            const Vector& wj = trace.steps[static_cast<std::size_t>(j)].residual;
            axpy(x_avg, a, xj);
            axpy(w_avg, a, wj);
            x_scale += std::abs(a) * norm(ip, xj);
            w_scale += std::abs(a) * norm(ip, wj);
        }
        Vector mid = diff(step.accepted, x_avg);      // x_{k} - x^alpha_{k-1}
        Vector rhs(w_avg.size());
        for (std::size_t i = 0; i < rhs.size(); ++i) { // beta_{k-1} w^alpha_k
            rhs[i] = step.beta * w_avg[i];
        }

        const double scale = std::max({lhs_scale, x_scale, step.beta * w_scale,
                                       std::numeric_limits<double>::min()});
        const double dev = std::max({norm(ip, diff(lhs, mid)), norm(ip, diff(mid, rhs)),
                                     norm(ip, diff(lhs, rhs))}) / scale;
        if (dev > res.worst_deviation) {
            res.worst_deviation = dev;
            res.location = static_cast<int>(s);
        }
        ++audited;
    }
    if (audited == 0) {
        throw InsufficientHistoryError("update_identity: trace has no mixed step");
    }
    res.passed = res.worst_deviation <= res.tolerance;
    return res;
}

AuditResult audit_gain_bound(const SolveReport& trace) {
    AuditResult res;
    res.name = "gain_bound";
    res.tolerance = 1e-12;
    res.worst_deviation = -std::numeric_limits<double>::infinity();
    if (trace.steps.empty()) {
        res.worst_deviation = 0.0;
        res.passed = true;
        return res;
    }
    for (std::size_t s = 0; s < trace.steps.size(); ++s) {
        const StepReport& step = trace.steps[s];
        double dev = std::max(step.theta - 1.0, -step.theta);
        if (step.residual_norm > 0.0) {
            dev = std::max(dev, step.mixed_residual_norm / step.residual_norm - 1.0);
        } else if (step.mixed_residual_norm > 0.0) {
            dev = std::numeric_limits<double>::infinity();
        }
        if (dev > res.worst_deviation) {
            res.worst_deviation = dev;
            res.location = static_cast<int>(s);
        }
    }
    res.passed = res.worst_deviation <= res.tolerance;
    return res;
}

AuditResult audit_lemma_m1(const SolveReport& trace, double kappa) {
    if (kappa >= 1.0) {
        throw NotContractiveError("audit_lemma_m1: kappa = " + std::to_string(kappa) +
                                  " is not a contraction constant");
    }
    if (!(kappa > 0.0)) {
        throw std::invalid_argument("audit_lemma_m1: kappa must be positive");
    }
    if (trace.config.depth_m != 1) {
        throw InsufficientHistoryError("audit_lemma_m1: requires a depth-1 trace");
    }
    if (!has_vectors(trace)) {
        throw InsufficientHistoryError("audit_lemma_m1: trace lacks stored vectors");
    }
    AuditResult res;
    res.name = "lemma_m1";
    res.tolerance = 1e-8;
    res.worst_deviation = -std::numeric_limits<double>::infinity();
    const InnerProduct& ip = trace.inner_product;
    const double inv = 1.0 / (1.0 - kappa);

    int audited = 0;
    for (std::size_t s = 1; s < trace.steps.size(); ++s) {
        const StepReport& step = trace.steps[s];
        if (step.depth_used != 1 || step.alpha.size() != 2) {
            continue;
        }
        const Vector e = diff(trace.iterate_before_step(static_cast<int>(s)),
                              trace.iterate_before_step(static_cast<int>(s) - 1));
        const double en = norm(ip, e);
        const double rhs_new = inv * trace.steps[s - 1].residual_norm; // ||w_{j-1}||
        const double rhs_old = inv * step.residual_norm;               // ||w_j||
        const double lhs_new = std::abs(step.alpha[1]) * en;
        const double lhs_old = std::abs(step.alpha[0]) * en;

        auto rel = [](double lhs, double rhs) {
            if (rhs > 0.0) return lhs / rhs - 1.0;
            return lhs > 0.0 ? std::numeric_limits<double>::infinity() : -1.0;
        };
        const double dev = std::max(rel(lhs_new, rhs_new), rel(lhs_old, rhs_old));
        if (dev > res.worst_deviation) {
            res.worst_deviation = dev;
            res.location = static_cast<int>(s);
        }
        ++audited;
    }
    if (audited == 0) {
        throw InsufficientHistoryError("audit_lemma_m1: trace has no depth-1 step");
    }
    res.passed = res.worst_deviation <= res.tolerance;
    return res;
}

AuditResult audit_rate_envelope(const SolveReport& trace, double kappa, bool fit_constant) {
    if (kappa >= 1.0) {
        throw NotContractiveError("audit_rate_envelope: kappa = " + std::to_string(kappa) +
                                  " is not a contraction constant");
    }
    if (!(kappa > 0.0)) {
        throw std::invalid_argument("audit_rate_envelope: kappa must be positive");
    }
    if (trace.config.depth_m < 1) {
        throw InsufficientHistoryError("audit_rate_envelope: requires depth >= 1");
    }
    const int n_steps = static_cast<int>(trace.steps.size());
    if (n_steps < 3) {
        throw InsufficientHistoryError("audit_rate_envelope: trace too short");
    }

    AuditResult res;
    res.name = fit_constant ? "rate_envelope(fit)" : "rate_envelope";
    res.tolerance = 1e-8;
    res.worst_deviation = -std::numeric_limits<double>::infinity();

    // The envelope is an asymptotic statement; fit over the trailing 80%.
    const int start = std::max(1, static_cast<int>(std::floor(0.2 * n_steps)));
    const int m = trace.config.depth_m;

    struct Pair {
        int s;
        double slack;
        double quad; // sum_{j=0..m} ||w_{s-j}||^2
    };
    std::vector<Pair> pairs;
    for (int s = start; s + 1 < n_steps; ++s) {
        const StepReport& cur = trace.steps[static_cast<std::size_t>(s)];
        const StepReport& nxt = trace.steps[static_cast<std::size_t>(s) + 1];
        const double factor = cur.theta * ((1.0 - cur.beta) + kappa * cur.beta);
        const double slack = nxt.residual_norm - factor * cur.residual_norm;
        double quad = 0.0;
        for (int j = 0; j <= m && s - j >= 0; ++j) {
            const double r = trace.steps[static_cast<std::size_t>(s - j)].residual_norm;
            quad += r * r;
        }
        pairs.push_back({s, slack, quad});
    }
    if (pairs.empty()) {
        throw InsufficientHistoryError("audit_rate_envelope: no step pairs in fit window");
    }

    if (!fit_constant) {
        for (const Pair& p : pairs) {
            const double scale = std::max(trace.steps[static_cast<std::size_t>(p.s)].residual_norm,
                                          std::numeric_limits<double>::min());
            const double dev = p.slack / scale;
            if (dev > res.worst_deviation) {
                res.worst_deviation = dev;
                res.location = p.s;
            }
        }
        res.fitted_constant = 0.0;
        res.passed = res.worst_deviation <= res.tolerance;
        return res;
    }

    double c_fit = 0.0;
    int c_loc = -1;
    for (const Pair& p : pairs) {
        if (p.slack > 0.0 && p.quad > 0.0 && p.slack / p.quad > c_fit) {
            c_fit = p.slack / p.quad;
            c_loc = p.s;
        }
    }
    // Consistency: every positive slack must be absorbed by C * quad.
    for (const Pair& p : pairs) {
        const double scale = std::max(p.quad, std::numeric_limits<double>::min());
        const double dev = (p.slack - c_fit * p.quad) / scale;
        if (dev > res.worst_deviation) {
            res.worst_deviation = dev;
            res.location = (c_loc >= 0) ? c_loc : p.s;
        }
    }
    res.fitted_constant = c_fit;
    res.passed = std::isfinite(c_fit) && res.worst_deviation <= res.tolerance;
    return res;
}

} // namespace aa::analysis

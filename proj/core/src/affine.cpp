#include "aa/problems/affine.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace aa::problems {

namespace {

// Dense solve by Gaussian elimination with full pivoting; small systems only.
Vector solve_dense_full_pivot(linalg::DenseMatrix m, Vector rhs) {
    const int n = m.rows;
    std::vector<int> col_perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) col_perm[static_cast<std::size_t>(i)] = i;

    for (int c = 0; c < n; ++c) {
        int pi = c, pj = c;
        double best = 0.0;
        for (int i = c; i < n; ++i) {
            for (int j = c; j < n; ++j) {
                if (std::abs(m(i, j)) > best) {
                    best = std::abs(m(i, j));
                    pi = i; pj = j;
                }
            }
        }
        if (best == 0.0) {
            throw std::invalid_argument("solve_dense_full_pivot: singular matrix");
        }
        if (pi != c) {
            for (int j = 0; j < n; ++j) std::swap(m(c, j), m(pi, j));
            std::swap(rhs[static_cast<std::size_t>(c)], rhs[static_cast<std::size_t>(pi)]);
        }
        if (pj != c) {
            for (int i = 0; i < n; ++i) std::swap(m(i, c), m(i, pj));
            std::swap(col_perm[static_cast<std::size_t>(c)], col_perm[static_cast<std::size_t>(pj)]);
        }
        for (int i = c + 1; i < n; ++i) {
            const double f = m(i, c) / m(c, c);
            for (int j = c; j < n; ++j) m(i, j) -= f * m(c, j);
            rhs[static_cast<std::size_t>(i)] -= f * rhs[static_cast<std::size_t>(c)];
        }
    }

    Vector y(static_cast<std::size_t>(n), 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double s = rhs[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) s -= m(i, j) * y[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(i)] = s / m(i, i);
    }
    Vector x(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < n; ++i) {
        x[static_cast<std::size_t>(col_perm[static_cast<std::size_t>(i)])] = y[static_cast<std::size_t>(i)];
    }
    return x;
}

} // namespace

Vector AffineContraction::apply(const Vector& x) const {
    Vector y = b;
    for (int j = 0; j < a.cols; ++j) {
        const double xj = x[static_cast<std::size_t>(j)];
        auto col = a.col(j);
        for (int i = 0; i < a.rows; ++i) {
            y[static_cast<std::size_t>(i)] += col[static_cast<std::size_t>(i)] * xj;
        }
    }
    return y;
}

double operator_norm_estimate(const linalg::DenseMatrix& a, double tol, int max_iters) {
    const int n = a.cols;
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Vector v(static_cast<std::size_t>(n));
    for (double& x : v) x = dist(rng);

    auto normalize = [](Vector& u) {
        double s = 0.0;
        for (double x : u) s += x * x;
        s = std::sqrt(s);
        if (s > 0.0) {
            for (double& x : u) x /= s;
        }
        return s;
    };
    normalize(v);

    double lambda = 0.0;
    for (int it = 0; it < max_iters; ++it) {
        // u = A v; s = A^T u  (one iteration on A^T A)
        Vector u(static_cast<std::size_t>(a.rows), 0.0);
        for (int j = 0; j < n; ++j) {
            const double vj = v[static_cast<std::size_t>(j)];
            auto col = a.col(j);
            for (int i = 0; i < a.rows; ++i) {
                u[static_cast<std::size_t>(i)] += col[static_cast<std::size_t>(i)] * vj;
            }
        }
        Vector s(static_cast<std::size_t>(n), 0.0);
        for (int j = 0; j < n; ++j) {
            auto col = a.col(j);
            double acc = 0.0;
            for (int i = 0; i < a.rows; ++i) {
                acc += col[static_cast<std::size_t>(i)] * u[static_cast<std::size_t>(i)];
            }
            s[static_cast<std::size_t>(j)] = acc;
        }
        const double new_lambda = normalize(s);
        v = std::move(s);
        if (it > 0 && std::abs(new_lambda - lambda) <= tol * std::max(new_lambda, 1e-300)) {
            lambda = new_lambda;
            break;
        }
        lambda = new_lambda;
    }
    return std::sqrt(lambda);
}

AffineContraction make_affine_explicit(linalg::DenseMatrix a, Vector b, double declared_kappa) {
    if (a.rows != a.cols || a.rows < 1) {
        throw std::invalid_argument("make_affine_explicit: matrix must be square");
    }
    if (static_cast<int>(b.size()) != a.rows) {
        throw std::invalid_argument("make_affine_explicit: offset size mismatch");
    }
    if (!(declared_kappa > 0.0 && declared_kappa < 1.0)) {
        throw std::invalid_argument("make_affine_explicit: kappa must lie in (0, 1), got " +
                                    std::to_string(declared_kappa));
    }
    const double norm_est = operator_norm_estimate(a);
    if (!(norm_est < declared_kappa)) {
        throw std::invalid_argument("make_affine_explicit: operator norm " +
                                    std::to_string(norm_est) +
                                    " is not strictly below declared kappa " +
                                    std::to_string(declared_kappa));
    }

    AffineContraction c;
    const int n = a.rows;
    linalg::DenseMatrix i_minus_a(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            i_minus_a(i, j) = (i == j ? 1.0 : 0.0) - a(i, j);
        }
    }
    c.fixed_point = solve_dense_full_pivot(std::move(i_minus_a), b);
    c.a = std::move(a);
    c.b = std::move(b);
    c.declared_kappa = declared_kappa;
    return c;
}

AffineContraction make_affine(int dimension, double target_kappa, std::uint64_t seed) {
    if (dimension < 1) {
        throw std::invalid_argument("make_affine: dimension must be >= 1");
    }
    if (!(target_kappa > 0.0 && target_kappa < 1.0)) {
        throw std::invalid_argument("make_affine: target_kappa must lie in (0, 1), got " +
                                    std::to_string(target_kappa));
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);

    linalg::DenseMatrix a(dimension, dimension);
    for (int j = 0; j < dimension; ++j) {
        for (int i = 0; i < dimension; ++i) {
            a(i, j) = dist(rng);
        }
    }
    Vector b(static_cast<std::size_t>(dimension));
    for (double& x : b) x = dist(rng);

    const double norm0 = operator_norm_estimate(a);
    if (norm0 == 0.0) {
        throw std::invalid_argument("make_affine: degenerate random matrix");
    }
    const double scale = 0.98 * target_kappa / norm0;
    for (double& x : a.entries) x *= scale;

    return make_affine_explicit(std::move(a), std::move(b), target_kappa);
}

FixedPointProblem make_affine_problem(const AffineContraction& contraction) {
    FixedPointProblem p;
    p.dimension = contraction.a.rows;
    p.eval_g = [c = contraction](const Vector& x) { return c.apply(x); };
    p.metadata.fixed_point = contraction.fixed_point;
    p.metadata.kappa = contraction.declared_kappa;
    p.metadata.name = "affine_n" + std::to_string(contraction.a.rows);
    return p;
}

} // namespace aa::problems

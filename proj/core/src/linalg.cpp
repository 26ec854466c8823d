#include "aa/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "aa/errors.hpp"

namespace aa::linalg {

DenseMatrix DenseMatrix::identity(int n) {
    DenseMatrix m(n, n);
    for (int i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

namespace {

// v -= c * q, returning the coefficient actually used.
void subtract_scaled(std::span<double> v, std::span<const double> q, double c) {
    for (std::size_t i = 0; i < v.size(); ++i) {
        v[i] -= c * q[i];
    }
}

} // namespace

QrResult economy_qr(const DenseMatrix& f, const InnerProduct& ip, double rank_drop_tol) {
    const int n = f.rows;
    QrResult out;
    out.q = DenseMatrix(n, 0);

    std::vector<Vector> q_cols;
    std::vector<std::vector<double>> r_cols; // R column per kept column

    for (int j = 0; j < f.cols; ++j) {
        Vector v(f.col(j).begin(), f.col(j).end());
        const double pre_norm = norm(ip, v);
        std::vector<double> coeffs(q_cols.size(), 0.0);

        for (std::size_t i = 0; i < q_cols.size(); ++i) {
            const double c = ip(q_cols[i], v);
            subtract_scaled(v, q_cols[i], c);
            coeffs[i] = c;
        }

        // One re-orthogonalization pass when orthogonality loss exceeds 1e-8.
        if (!q_cols.empty()) {
            const double nv = norm(ip, v);
            if (nv > 0.0) {
                double worst = 0.0;
                for (const auto& q : q_cols) {
                    worst = std::max(worst, std::abs(ip(q, v)) / nv);
                }
                if (worst > 1e-8) {
                    for (std::size_t i = 0; i < q_cols.size(); ++i) {
                        const double c = ip(q_cols[i], v);
                        subtract_scaled(v, q_cols[i], c);
                        coeffs[i] += c;
                    }
                }
            }
        }

        const double post_norm = norm(ip, v);
        if (pre_norm == 0.0 || post_norm < rank_drop_tol * pre_norm) {
            continue; // near-dependent column: drop it
        }

        for (double& x : v) {
            x /= post_norm;
        }
        coeffs.push_back(post_norm);
        q_cols.push_back(std::move(v));
        r_cols.push_back(std::move(coeffs));
        out.kept_columns.push_back(j);
    }

    const int k = static_cast<int>(q_cols.size());
    out.q = DenseMatrix(n, k);
    out.r = DenseMatrix(k, k);
    for (int j = 0; j < k; ++j) {
        std::copy(q_cols[j].begin(), q_cols[j].end(), out.q.col(j).begin());
        for (int i = 0; i <= j; ++i) {
            out.r(i, j) = r_cols[j][static_cast<std::size_t>(i)];
        }
    }
    return out;
}

LeastSquaresResult least_squares(const DenseMatrix& q, const DenseMatrix& r,
                                 std::span<const double> w, const InnerProduct& ip) {
    const int k = q.cols;
    LeastSquaresResult out;

    std::vector<double> proj(k, 0.0);
    double proj_sq = 0.0;
    for (int i = 0; i < k; ++i) {
        proj[i] = ip(q.col(i), w);
        proj_sq += proj[i] * proj[i];
    }

    out.coefficients.assign(k, 0.0);
    for (int i = k - 1; i >= 0; --i) {
        if (r(i, i) == 0.0) {
            throw SingularError("least_squares: zero diagonal in R at index " + std::to_string(i));
        }
        double s = proj[i];
        for (int j = i + 1; j < k; ++j) {
            s -= r(i, j) * out.coefficients[static_cast<std::size_t>(j)];
        }
        out.coefficients[static_cast<std::size_t>(i)] = s / r(i, i);
    }

    const double w_sq = ip(w, w);
    out.residual_norm = std::sqrt(std::max(0.0, w_sq - proj_sq));
    return out;
}

Vector thomas_solve(const TridiagonalMatrix& t, std::span<const double> rhs) {
    const int n = t.size();
    if (static_cast<int>(rhs.size()) != n) {
        throw std::invalid_argument("thomas_solve: rhs size " + std::to_string(rhs.size()) +
                                    " != matrix size " + std::to_string(n));
    }

    std::vector<double> d(t.diag.begin(), t.diag.end());
    Vector b(rhs.begin(), rhs.end());

    auto row_scale = [&](int i) {
        double s = std::abs(t.diag[static_cast<std::size_t>(i)]);
        if (i > 0) s = std::max(s, std::abs(t.sub[static_cast<std::size_t>(i) - 1]));
        if (i + 1 < n) s = std::max(s, std::abs(t.super[static_cast<std::size_t>(i)]));
        return s;
    };

    auto pivot_bad = [&](double pivot, int row) {
        return pivot == 0.0 || std::abs(pivot) < 1e-14 * row_scale(row);
    };
    for (int i = 1; i < n; ++i) {
        const double pivot = d[static_cast<std::size_t>(i) - 1];
        if (pivot_bad(pivot, i - 1)) {
            throw SingularError("thomas_solve: negligible pivot at row " + std::to_string(i - 1));
        }
        const double m = t.sub[static_cast<std::size_t>(i) - 1] / pivot;
        d[static_cast<std::size_t>(i)] -= m * t.super[static_cast<std::size_t>(i) - 1];
        b[static_cast<std::size_t>(i)] -= m * b[static_cast<std::size_t>(i) - 1];
    }
    if (pivot_bad(d[static_cast<std::size_t>(n) - 1], n - 1)) {
        throw SingularError("thomas_solve: negligible pivot at row " + std::to_string(n - 1));
    }

    Vector x(static_cast<std::size_t>(n), 0.0);
    x[static_cast<std::size_t>(n) - 1] = b[static_cast<std::size_t>(n) - 1] / d[static_cast<std::size_t>(n) - 1];
    for (int i = n - 2; i >= 0; --i) {
        x[static_cast<std::size_t>(i)] =
            (b[static_cast<std::size_t>(i)] -
             t.super[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i) + 1]) /
            d[static_cast<std::size_t>(i)];
    }
    return x;
}

} // namespace aa::linalg

#ifndef AA_LINALG_HPP
#define AA_LINALG_HPP

#include <span>
#include <vector>

#include "aa/vec.hpp"

namespace aa::linalg {

/// Column-major dense matrix.
struct DenseMatrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> entries; // size rows * cols, column-major

    DenseMatrix() = default;
    DenseMatrix(int r, int c) : rows(r), cols(c), entries(static_cast<std::size_t>(r) * c, 0.0) {}

    static DenseMatrix identity(int n);

    double& operator()(int i, int j) { return entries[static_cast<std::size_t>(j) * rows + i]; }
    double operator()(int i, int j) const { return entries[static_cast<std::size_t>(j) * rows + i]; }

    std::span<double> col(int j) { return {entries.data() + static_cast<std::size_t>(j) * rows, static_cast<std::size_t>(rows)}; }
    std::span<const double> col(int j) const { return {entries.data() + static_cast<std::size_t>(j) * rows, static_cast<std::size_t>(rows)}; }
};

/// Result of an economy QR factorization restricted to the retained columns.
struct QrResult {
    DenseMatrix q;                 // rows x k, columns orthonormal under the inner product
    DenseMatrix r;                 // k x k, upper triangular
    std::vector<int> kept_columns; // indices into the original matrix, ascending
};

/// Economy QR by modified Gram-Schmidt under an arbitrary inner product.
/// A column whose post-orthogonalization norm falls below rank_drop_tol times
/// its pre-orthogonalization norm is discarded.  One re-orthogonalization pass
/// is applied when the remaining loss of orthogonality exceeds 1e-8.
QrResult economy_qr(const DenseMatrix& f, const InnerProduct& ip, double rank_drop_tol);

struct LeastSquaresResult {
    std::vector<double> coefficients; // one per kept column
    double residual_norm = 0.0;
};

/// Minimizes ||w - Q R c|| given the factorization from economy_qr.
/// coefficients = R^{-1} Q^T w by back substitution;
/// residual_norm^2 = ||w||^2 - ||Q^T w||^2, clamped at zero.
/// Throws SingularError if R has an exactly zero diagonal entry.
LeastSquaresResult least_squares(const DenseMatrix& q, const DenseMatrix& r,
                                 std::span<const double> w, const InnerProduct& ip);

/// Tridiagonal matrix; sub and super have length n-1, diag has length n.
struct TridiagonalMatrix {
    std::vector<double> sub;
    std::vector<double> diag;
    std::vector<double> super;

    int size() const { return static_cast<int>(diag.size()); }
};

/// Thomas algorithm without pivoting.  Throws SingularError when a pivot
/// magnitude falls below 1e-14 times the row scale.
Vector thomas_solve(const TridiagonalMatrix& t, std::span<const double> rhs);

} // namespace aa::linalg

#endif // AA_LINALG_HPP

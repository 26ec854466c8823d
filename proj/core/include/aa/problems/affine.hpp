#ifndef AA_PROBLEMS_AFFINE_HPP
#define AA_PROBLEMS_AFFINE_HPP

#include <cstdint>

#include "aa/linalg.hpp"
#include "aa/problem.hpp"

namespace aa::problems {

/// g(x) = A x + b with operator norm of A strictly below declared_kappa,
/// so the map is a contraction with known constant.  Serves as the oracle
/// problem for the contraction-based audits.
struct AffineContraction {
    linalg::DenseMatrix a;
    Vector b;
    double declared_kappa = 0.0; // ||A||_2 < declared_kappa < 1
    Vector fixed_point;          // (I - A)^{-1} b

    Vector apply(const Vector& x) const;
};

/// Largest singular value of a, by power iteration on a^T a.
/// Converges to relative tolerance tol (default resolves within 1e-6 easily).
double operator_norm_estimate(const linalg::DenseMatrix& a, double tol = 1e-9,
                              int max_iters = 50000);

/// Builds an AffineContraction from an explicit matrix and offset.  Verifies
/// by power iteration that ||A|| < declared_kappa and computes the fixed point
/// by dense elimination.  Throws std::invalid_argument when the norm bound or
/// kappa range fails.
AffineContraction make_affine_explicit(linalg::DenseMatrix a, Vector b,
                                       double declared_kappa);

/// Random instance with entries drawn from a seeded generator and the matrix
/// rescaled so its operator norm is 0.98 * target_kappa (strictly below the
/// declared constant).  0 < target_kappa < 1.  A fixed seed gives an
/// identical problem across runs.
AffineContraction make_affine(int dimension, double target_kappa, std::uint64_t seed);

FixedPointProblem make_affine_problem(const AffineContraction& contraction);

} // namespace aa::problems

#endif // AA_PROBLEMS_AFFINE_HPP

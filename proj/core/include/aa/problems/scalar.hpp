#ifndef AA_PROBLEMS_SCALAR_HPP
#define AA_PROBLEMS_SCALAR_HPP

#include "aa/problem.hpp"

namespace aa::problems {

/// The three scalar fixed-point test maps:
///   FPP1: g(x) = 1 + 2/x              (linear convergence to x* = 2)
///   FPP2: g(x) = x - (cos x - sin x)/(-sin x - cos x)
///                                     (Newton for cos x = sin x; x* = pi/4)
///   FPP3: g(x) = x^2 - 2              (expansive at x* = 2)
enum class ScalarProblemKind { FPP1, FPP2, FPP3 };

/// Evaluates the map.  Throws DomainError at excluded points
/// (FPP1: x = 0; FPP2: sin x + cos x = 0).
double scalar_g(ScalarProblemKind kind, double x);

double scalar_fixed_point(ScalarProblemKind kind); // 2, pi/4, 2
double scalar_default_x0(ScalarProblemKind kind);  // 2.1, 1, 4

const char* scalar_name(ScalarProblemKind kind);

/// Wraps the map as a 1-dimensional FixedPointProblem with metadata
/// (fixed point; kappa = 0.5 for FPP1, the only locally contractive map
/// with a linear rate).
FixedPointProblem make_scalar_problem(ScalarProblemKind kind);

} // namespace aa::problems

#endif // AA_PROBLEMS_SCALAR_HPP

#ifndef AA_PROBLEMS_QUASILINEAR_HPP
#define AA_PROBLEMS_QUASILINEAR_HPP

#include "aa/linalg.hpp"
#include "aa/problem.hpp"

namespace aa::problems {

/// 1D quasilinear two-point boundary value problem
///   -(a(u) u')' = f on (0,1),  u(0) = u(1) = 0,
///   a(u) = k + tanh((u - u0)/eps),
/// discretized with P1 finite elements on a uniform mesh and iterated by
/// freezing the coefficient at the previous iterate (Picard).  The load f is
/// manufactured so the exact solution is u*(x) = exact_amp * sin(pi x).
struct QuasilinearSpec {
    int mesh_n = 1024;    // number of elements
    double k_coef = 1.01; // must exceed 1 so a(u) > 0 for all u
    double u0_coef = 0.5;
    double epsilon = 0.1;
    double exact_amp = 10.0;
    bool mass_weighted_inner_product = false; // optional M-weighted optimization

    void validate() const; // throws std::invalid_argument

    double coefficient(double u) const;    // a(u), lies in (k-1, k+1)
    double exact_solution(double x) const; // u*(x)
    int interior_nodes() const { return mesh_n - 1; }
    double mesh_h() const { return 1.0 / mesh_n; }
};

/// f(x) = -d/dx [ a(u*(x)) u*'(x) ], expanded analytically.
double manufactured_load(const QuasilinearSpec& spec, double x);

/// One Picard step: assembles the P1 stiffness matrix with coefficient
/// a(u_h) by 2-point Gauss quadrature per element, assembles the load for
/// the manufactured f with the same rule, solves the tridiagonal system.
/// u holds the mesh_n - 1 interior nodal values.
Vector quasilinear_picard_g(const QuasilinearSpec& spec, const Vector& u);

/// Interior-node interpolant of the exact solution.
Vector interpolate_exact(const QuasilinearSpec& spec);

/// P1 mass matrix on the interior nodes (for the weighted inner product).
linalg::TridiagonalMatrix interior_mass_matrix(const QuasilinearSpec& spec);

FixedPointProblem make_quasilinear_problem(const QuasilinearSpec& spec);

} // namespace aa::problems

#endif // AA_PROBLEMS_QUASILINEAR_HPP

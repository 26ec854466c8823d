#include "aa/problems/scalar.hpp"

#include <cmath>
#include <numbers>

#include "aa/errors.hpp"

namespace aa::problems {

double scalar_g(ScalarProblemKind kind, double x) {
    switch (kind) {
        case ScalarProblemKind::FPP1:
            if (x == 0.0) {
                throw DomainError("FPP1: g(x) = 1 + 2/x has a pole at x = 0");
            }
            return 1.0 + 2.0 / x;
        case ScalarProblemKind::FPP2: {
            const double c = std::cos(x);
            const double s = std::sin(x);
            const double denom = -s - c;
            if (denom == 0.0) {
                throw DomainError("FPP2: sin(x) + cos(x) = 0 at x = " + std::to_string(x));
            }
            return x - (c - s) / denom;
        }
        case ScalarProblemKind::FPP3:
            return x * x - 2.0;
    }
    throw std::invalid_argument("scalar_g: unknown problem kind");
}

double scalar_fixed_point(ScalarProblemKind kind) {
    switch (kind) {
        case ScalarProblemKind::FPP1: return 2.0;
        case ScalarProblemKind::FPP2: return std::numbers::pi / 4.0;
        case ScalarProblemKind::FPP3: return 2.0;
    }
    throw std::invalid_argument("scalar_fixed_point: unknown problem kind");
}

double scalar_default_x0(ScalarProblemKind kind) {
    switch (kind) {
        case ScalarProblemKind::FPP1: return 2.1;
        case ScalarProblemKind::FPP2: return 1.0;
        case ScalarProblemKind::FPP3: return 4.0;
    }
    throw std::invalid_argument("scalar_default_x0: unknown problem kind");
}

const char* scalar_name(ScalarProblemKind kind) {
    switch (kind) {
        case ScalarProblemKind::FPP1: return "fpp1";
        case ScalarProblemKind::FPP2: return "fpp2";
        case ScalarProblemKind::FPP3: return "fpp3";
    }
    return "unknown";
}

FixedPointProblem make_scalar_problem(ScalarProblemKind kind) {
    FixedPointProblem p;
    p.dimension = 1;
    p.eval_g = [kind](const Vector& x) { return Vector{scalar_g(kind, x[0])}; };
    p.metadata.fixed_point = Vector{scalar_fixed_point(kind)};
    if (kind == ScalarProblemKind::FPP1) {
        p.metadata.kappa = 0.5; // |g'(2)|
    }
    p.metadata.name = scalar_name(kind);
    return p;
}

} // namespace aa::problems

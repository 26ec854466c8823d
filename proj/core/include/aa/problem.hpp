#ifndef AA_PROBLEM_HPP
#define AA_PROBLEM_HPP

#include <functional>
#include <optional>
#include <string>

#include "aa/vec.hpp"

namespace aa {

/// Optional analytic facts about a problem, used by audits and tests.
struct ProblemMetadata {
    std::optional<Vector> fixed_point;
    std::optional<double> kappa; // contraction constant in (0,1), when known
    std::string name;
};

/// A fixed-point problem x = g(x) on R^n together with the inner product in
/// which the mixing optimization and all norms are taken.
///
/// eval_g must be deterministic: identical inputs produce identical outputs.
struct FixedPointProblem {
    int dimension = 0;
    std::function<Vector(const Vector&)> eval_g;
    InnerProduct inner_product = euclidean_inner_product();
    ProblemMetadata metadata{};
};

} // namespace aa

#endif // AA_PROBLEM_HPP

#ifndef AA_VEC_HPP
#define AA_VEC_HPP

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace aa {

/// State vectors are plain dense double vectors.
using Vector = std::vector<double>;

/// A symmetric positive-definite bilinear form on state vectors.
/// The default everywhere is the unweighted Euclidean product.
using InnerProduct =
    std::function<double(std::span<const double>, std::span<const double>)>;

inline double euclidean_dot(std::span<const double> u, std::span<const double> v) {
    double s = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        s += u[i] * v[i];
    }
    return s;
}

inline InnerProduct euclidean_inner_product() {
    return &euclidean_dot;
}

inline double norm(const InnerProduct& ip, std::span<const double> v) {
    return std::sqrt(ip(v, v));
}

inline bool all_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) {
            return false;
        }
    }
    return true;
}

/// (1 - beta) * a + beta * b, elementwise.  beta == 1 returns b unchanged so
/// that an undamped step performs no mixing arithmetic at all.
inline Vector damped_combination(const Vector& a, const Vector& b, double beta) {
    if (beta == 1.0) {
        return b;
    }
    Vector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = (1.0 - beta) * a[i] + beta * b[i];
    }
    return out;
}

} // namespace aa

#endif // AA_VEC_HPP

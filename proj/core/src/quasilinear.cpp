#include "aa/problems/quasilinear.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace aa::problems {

namespace {
// 2-point Gauss points on the reference element (0,1).
constexpr double kGaussOffset = 0.28867513459481287; // 1/(2 sqrt(3))
constexpr double kT1 = 0.5 - kGaussOffset;
constexpr double kT2 = 0.5 + kGaussOffset;
} // namespace

void QuasilinearSpec::validate() const {
    if (mesh_n < 2) {
        throw std::invalid_argument("QuasilinearSpec: mesh_n must be >= 2, got " +
                                    std::to_string(mesh_n));
    }
    if (!(k_coef > 1.0)) {
        throw std::invalid_argument("QuasilinearSpec: k_coef must exceed 1 so a(u) > 0");
    }
    if (!(epsilon > 0.0)) {
        throw std::invalid_argument("QuasilinearSpec: epsilon must be positive");
    }
}

double QuasilinearSpec::coefficient(double u) const {
    return k_coef + std::tanh((u - u0_coef) / epsilon);
}

double QuasilinearSpec::exact_solution(double x) const {
    return exact_amp * std::sin(std::numbers::pi * x);
}

double manufactured_load(const QuasilinearSpec& spec, double x) {
    const double pi = std::numbers::pi;
    const double s = std::sin(pi * x);
    const double c = std::cos(pi * x);
    const double arg = (spec.exact_amp * s - spec.u0_coef) / spec.epsilon;
    const double ch = std::cosh(arg);
    const double sech2 = 1.0 / (ch * ch);
    // f = -(a(u*) u*')' = -a'(u*) (u*')^2 - a(u*) u*''
    return -(spec.exact_amp * spec.exact_amp * pi * pi / spec.epsilon) * c * c * sech2 +
           spec.exact_amp * pi * pi * s * (spec.k_coef + std::tanh(arg));
}

Vector quasilinear_picard_g(const QuasilinearSpec& spec, const Vector& u) {
    spec.validate();
    const int n = spec.interior_nodes();
    if (static_cast<int>(u.size()) != n) {
        throw std::invalid_argument("quasilinear_picard_g: expected " + std::to_string(n) +
                                    " interior nodal values, got " + std::to_string(u.size()));
    }
    const double h = spec.mesh_h();
    const int ne = spec.mesh_n;

    auto node_value = [&](int global) -> double {
        if (global == 0 || global == ne) return 0.0;
        return u[static_cast<std::size_t>(global) - 1];
    };

    // Element coefficient integrals S_e = int_e a(u_h) dx and the load.
    std::vector<double> s_elem(static_cast<std::size_t>(ne), 0.0);
    Vector load(static_cast<std::size_t>(n), 0.0);
    for (int e = 0; e < ne; ++e) {
        const double ul = node_value(e);
        const double ur = node_value(e + 1);
        const double u_q1 = ul * (1.0 - kT1) + ur * kT1;
        const double u_q2 = ul * (1.0 - kT2) + ur * kT2;
        s_elem[static_cast<std::size_t>(e)] =
            0.5 * h * (spec.coefficient(u_q1) + spec.coefficient(u_q2));

        const double x_q1 = (static_cast<double>(e) + kT1) * h;
        const double x_q2 = (static_cast<double>(e) + kT2) * h;
        const double f1 = manufactured_load(spec, x_q1);
        const double f2 = manufactured_load(spec, x_q2);
        if (e >= 1) {
            load[static_cast<std::size_t>(e) - 1] += 0.5 * h * (f1 * (1.0 - kT1) + f2 * (1.0 - kT2));
        }
        if (e <= ne - 2) {
            load[static_cast<std::size_t>(e)] += 0.5 * h * (f1 * kT1 + f2 * kT2);
        }
    }

    linalg::TridiagonalMatrix t;
    t.diag.resize(static_cast<std::size_t>(n));
    t.sub.resize(static_cast<std::size_t>(n) - 1);
    t.super.resize(static_cast<std::size_t>(n) - 1);
    const double inv_h2 = 1.0 / (h * h);
    for (int i = 0; i < n; ++i) {
        t.diag[static_cast<std::size_t>(i)] =
            (s_elem[static_cast<std::size_t>(i)] + s_elem[static_cast<std::size_t>(i) + 1]) * inv_h2;
    }
    for (int i = 0; i + 1 < n; ++i) {
        const double off = -s_elem[static_cast<std::size_t>(i) + 1] * inv_h2;
        t.sub[static_cast<std::size_t>(i)] = off;
        t.super[static_cast<std::size_t>(i)] = off;
    }

    return linalg::thomas_solve(t, load);
}

Vector interpolate_exact(const QuasilinearSpec& spec) {
    const int n = spec.interior_nodes();
    Vector out(static_cast<std::size_t>(n));
    const double h = spec.mesh_h();
    for (int i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = spec.exact_solution((i + 1) * h);
    }
    return out;
}

linalg::TridiagonalMatrix interior_mass_matrix(const QuasilinearSpec& spec) {
    const int n = spec.interior_nodes();
    const double h = spec.mesh_h();
    linalg::TridiagonalMatrix m;
    m.diag.assign(static_cast<std::size_t>(n), 2.0 * h / 3.0);
    m.sub.assign(static_cast<std::size_t>(n) - 1, h / 6.0);
    m.super.assign(static_cast<std::size_t>(n) - 1, h / 6.0);
    return m;
}

FixedPointProblem make_quasilinear_problem(const QuasilinearSpec& spec) {
    spec.validate();
    FixedPointProblem p;
    p.dimension = spec.interior_nodes();
    p.eval_g = [spec](const Vector& u) { return quasilinear_picard_g(spec, u); };
    if (spec.mass_weighted_inner_product) {
        const auto m = interior_mass_matrix(spec);
        p.inner_product = [m](std::span<const double> a, std::span<const double> b) {
            const std::size_t n = a.size();
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double mb = m.diag[i] * b[i];
                if (i > 0) mb += m.sub[i - 1] * b[i - 1];
                if (i + 1 < n) mb += m.super[i] * b[i + 1];
                acc += a[i] * mb;
            }
            return acc;
        };
    }
    p.metadata.name = "quasilinear_mesh" + std::to_string(spec.mesh_n);
    return p;
}

} // namespace aa::problems

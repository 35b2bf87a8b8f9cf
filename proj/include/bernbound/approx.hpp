#pragma once

// Approximating target functions: L2 projection through moments, the two
// sampling baselines, and L2 errors against the built-in corpus.

#include "bernstein.hpp"
#include "expression.hpp"
#include "quadrature.hpp"
#include "simplex.hpp"

#include <algorithm>
#include <numbers>
#include <optional>
#include <vector>

namespace bernbound {

struct TargetFunction {
    std::string id;
    int dim = 1;          ///< 1: [0,1]; 2: unit right triangle
    Function2 eval;       ///< f(x, y); y is ignored for dim 1
    double lower = 0.0;
    double upper = 1.0;

    double operator()(double x, double y = 0.0) const { return eval(x, y); }
};

/// Built-in targets. f2 subtracts 1/26 after scaling the bump by 26/25; f2c
/// subtracts it before scaling, so it vanishes at both endpoints.
inline const std::vector<TargetFunction>& corpus() {
    using std::numbers::pi;
    static const std::vector<TargetFunction> funcs = {
        {"f0", 1, [](double x, double) { return 0.5 * (std::sin(2.0 * pi * x) + 1.0); }, 0.0, 1.0},
        {"f1", 1, [](double x, double) { return 0.01 + x / (x * x + 1.0); }, 0.0, 1.0},
        {"f2", 1,
         [](double x, double) {
             const double t = 2.0 * x - 1.0;
             return (26.0 / 25.0) * (1.0 / (1.0 + 25.0 * t * t)) - 1.0 / 26.0;
         },
         0.0, 26.0 / 25.0 - 1.0 / 26.0},
        {"f2c", 1,
         [](double x, double) {
             const double t = 2.0 * x - 1.0;
             return (26.0 / 25.0) * (1.0 / (1.0 + 25.0 * t * t) - 1.0 / 26.0);
         },
         0.0, 1.0},
        {"f3", 1, [](double x, double) { return pi / 2.0 + std::atan(30.0 * (x - 0.5)); }, 0.0, pi},
        {"g0", 2, [](double x, double y) { return 0.5 * (1.0 - std::sin(pi * (x - y))); }, 0.0, 1.0},
        {"g1", 2,
         [](double x, double y) {
             const double s = x - y + 1.0;
             return 0.01 + 2.0 * s / (s * s + 4.0);
         },
         0.0, 1.0},
        {"g2", 2,
         [](double x, double y) {
             const double t = x - y;
             return (26.0 / 25.0) * (1.0 / (1.0 + 25.0 * t * t) - 1.0 / 26.0);
         },
         0.0, 1.0},
    };
    return funcs;
}

inline std::optional<TargetFunction> find_target(const std::string& id) {
    for (const auto& f : corpus())
        if (f.id == id) return f;
    return std::nullopt;
}

/// User function from an expression string; bounds are unknown.
inline TargetFunction expression_target(const std::string& expr, int dim) {
    return TargetFunction{expr, dim, parse_expression(expr), 0.0, std::numeric_limits<double>::infinity()};
}

/// f_i = integral of f B^m_i over [0,1].
inline Vector moments(const TargetFunction& f, int m, const Quadrature& quad) {
    Vector out = Vector::Zero(m + 1);
    for (std::size_t k = 0; k < quad.size(); ++k) {
        const double x = quad.x[k];
        const double fw = quad.w[k] * f(x);
        for (int i = 0; i <= m; ++i) out[i] += fw * bernstein_basis(m, i, x);
    }
    return out;
}

/// Values of every B^n_alpha (canonical order) at a Cartesian point.
inline Vector simplex_basis_values(int d, int n, const std::vector<double>& x) {
    const auto b = barycentric(x);
    const auto idx = multiindices(d, n);
    const double nf = detail::factorial(n);
    Vector out(static_cast<Eigen::Index>(idx.size()));
    for (std::size_t k = 0; k < idx.size(); ++k) {
        double v = nf / multiindex_factorial(idx[k]);
        for (int i = 0; i <= d; ++i) v *= std::pow(b[static_cast<std::size_t>(i)], idx[k][i]);
        out[static_cast<Eigen::Index>(k)] = v;
    }
    return out;
}

inline Vector simplex_moments(const TargetFunction& f, int m, const Quadrature& quad) {
    Vector out = Vector::Zero(simplex_dim(2, m));
    for (std::size_t k = 0; k < quad.size(); ++k)
        out += quad.w[k] * f(quad.x[k], quad.y[k]) * simplex_basis_values(2, m, {quad.x[k], quad.y[k]});
    return out;
}

/// Unconstrained L2-best degree-m approximation, Pi(p*) = U^{m,m} (U^{m,m})^T f.
inline PolyCoeffs project(const TargetFunction& f, int m, const Quadrature& quad) {
    const auto sf = spectral_factors(m, m);
    return PolyCoeffs(sf.u * (sf.u.transpose() * moments(f, m, quad)));
}

inline SimplexPoly simplex_project(const TargetFunction& f, int m, const Quadrature& quad) {
    const auto sf = simplex_spectral_factors(2, m, m);
    return SimplexPoly(2, m, sf.u * (sf.u.transpose() * simplex_moments(f, m, quad)));
}

/// B_m(f): coefficients are the samples f(i/m).
inline PolyCoeffs bernstein_operator(const TargetFunction& f, int m) {
    if (m < 1) throw std::invalid_argument("bernstein_operator: m must be >= 1");
    Vector c(m + 1);
    for (int i = 0; i <= m; ++i) c[i] = f(static_cast<double>(i) / m);
    return PolyCoeffs(std::move(c));
}

/// Continuous piecewise-linear function on the uniform nodes i/m.
struct PiecewiseLinear {
    std::vector<double> values;  ///< at nodes i/m, i = 0..m

    int intervals() const { return static_cast<int>(values.size()) - 1; }

    double operator()(double x) const {
        const int m = intervals();
        const double s = std::clamp(x, 0.0, 1.0) * m;
        const int i = std::min(static_cast<int>(s), m - 1);
        const double t = s - i;
        return (1.0 - t) * values[static_cast<std::size_t>(i)] + t * values[static_cast<std::size_t>(i + 1)];
    }
};

inline PiecewiseLinear p1_interpolant(const TargetFunction& f, int m) {
    if (m < 1) throw std::invalid_argument("p1_interpolant: m must be >= 1");
    PiecewiseLinear p;
    for (int i = 0; i <= m; ++i) p.values.push_back(f(static_cast<double>(i) / m));
    return p;
}

inline double l2_error(const TargetFunction& f, const PolyCoeffs& q, const Quadrature& quad) {
    double s = 0.0;
    for (std::size_t k = 0; k < quad.size(); ++k) {
        const double e = f(quad.x[k]) - evaluate(q, quad.x[k]);
        s += quad.w[k] * e * e;
    }
    return std::sqrt(s);
}

/// Integrates piece by piece so the kinks at i/m never sit inside a Gauss cell.
inline double l2_error(const TargetFunction& f, const PiecewiseLinear& q, const Quadrature& quad) {
    const int m = q.intervals();
    const auto g = gauss_legendre(std::max(quad.points, 2));
    Quadrature pieces;
    const int sub = std::max(1, quad.subintervals / m);
    for (int i = 0; i < m; ++i) append_interval(pieces, g, static_cast<double>(i) / m, static_cast<double>(i + 1) / m, sub);
    double s = 0.0;
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        const double e = f(pieces.x[k]) - q(pieces.x[k]);
        s += pieces.w[k] * e * e;
    }
    return std::sqrt(s);
}

inline double l2_error(const TargetFunction& f, const SimplexPoly& q, const Quadrature& quad) {
    double s = 0.0;
    for (std::size_t k = 0; k < quad.size(); ++k) {
        const double e =
            f(quad.x[k], quad.y[k]) - simplex_basis_values(q.dim, q.degree, {quad.x[k], quad.y[k]}).dot(q.coeffs);
        s += quad.w[k] * e * e;
    }
    return std::sqrt(s);
}

} // namespace bernbound

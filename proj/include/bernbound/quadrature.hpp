#pragma once

// Composite Gauss-Legendre rules on [0,1] and collapsed (Duffy) tensor rules
// on the unit right triangle.

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bernbound {

struct GaussRule {
    std::vector<double> nodes;    ///< on [-1, 1]
    std::vector<double> weights;
};

/// n-point Gauss-Legendre rule by Newton iteration on P_n.
inline GaussRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
    GaussRule r;
    r.nodes.resize(static_cast<std::size_t>(n));
    r.weights.resize(static_cast<std::size_t>(n));
    // returns (P_n(x), P_n'(x))
    auto legendre = [n](double x) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = pk;
        }
        return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
    };
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [p, dp] = legendre(x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double dp = legendre(x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        r.nodes[static_cast<std::size_t>(i)] = -x;
        r.nodes[static_cast<std::size_t>(n - 1 - i)] = x;
        r.weights[static_cast<std::size_t>(i)] = w;
        r.weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    if (n % 2 == 1) r.nodes[static_cast<std::size_t>(n / 2)] = 0.0;
    return r;
}

/// Nodes/weights on [0,1] (dim 1) or on S_2 (dim 2, y populated).
struct Quadrature {
    std::string kind;
    int dim = 1;
    int points = 0;          ///< Gauss points per subinterval and direction
    int subintervals = 1;
    int design_degree = 0;   ///< total polynomial degree integrated exactly
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> w;

    std::size_t size() const { return w.size(); }

    double integrate(const std::function<double(double, double)>& f) const {
        double s = 0.0;
        for (std::size_t k = 0; k < w.size(); ++k) s += w[k] * f(x[k], dim == 2 ? y[k] : 0.0);
        return s;
    }
};

/// Composite rule on [0,1]; exact for degree 2*points - 1.
inline Quadrature composite_gauss(int points = 24, int subintervals = 16) {
    const auto g = gauss_legendre(points);
    Quadrature q;
    q.kind = "composite-gauss-legendre";
    q.points = points;
    q.subintervals = subintervals;
    q.design_degree = 2 * points - 1;
    const double h = 1.0 / subintervals;
    for (int s = 0; s < subintervals; ++s)
        for (int i = 0; i < points; ++i) {
            q.x.push_back(h * (s + 0.5 * (g.nodes[static_cast<std::size_t>(i)] + 1.0)));
            q.w.push_back(0.5 * h * g.weights[static_cast<std::size_t>(i)]);
        }
    return q;
}

/// Gauss rule on an arbitrary interval [a, b], `subintervals` equal pieces.
inline void append_interval(Quadrature& q, const GaussRule& g, double a, double b, int subintervals) {
    const double h = (b - a) / subintervals;
    for (int s = 0; s < subintervals; ++s)
        for (std::size_t i = 0; i < g.nodes.size(); ++i) {
            q.x.push_back(a + h * (s + 0.5 * (g.nodes[i] + 1.0)));
            q.w.push_back(0.5 * h * g.weights[i]);
        }
}

/// Collapsed tensor rule on S_2 = {x, y >= 0, x + y <= 1}:
/// (u, v) in [0,1]^2 -> (u, (1 - u) v), Jacobian (1 - u).
/// Exact for total degree 2*points - 2.
inline Quadrature collapsed_triangle(int points = 24, int subintervals = 8) {
    const Quadrature line = composite_gauss(points, subintervals);
    Quadrature q;
    q.kind = "collapsed-gauss-triangle";
    q.dim = 2;
    q.points = points;
    q.subintervals = subintervals;
    q.design_degree = 2 * points - 2;
    for (std::size_t i = 0; i < line.size(); ++i)
        for (std::size_t j = 0; j < line.size(); ++j) {
            const double u = line.x[i];
            q.x.push_back(u);
            q.y.push_back((1.0 - u) * line.x[j]);
            q.w.push_back(line.w[i] * line.w[j] * (1.0 - u));
        }
    return q;
}

} // namespace bernbound

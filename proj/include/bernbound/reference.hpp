#pragma once

// Brute-force oracles for tests: a quadratic-penalty solver for the linearly
// constrained projection problems, and central-difference gradients.
//
// The penalty solver only uses the mass and elevation matrices in closed form,
// never the spectral factors or the active-set machinery it is meant to check.

#include "bernstein.hpp"
#include "kkt.hpp"
#include "simplex.hpp"

#include <Eigen/Cholesky>

#include <functional>
#include <stdexcept>
#include <vector>

namespace bernbound {

class stalled_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PenaltyConfig {
    double rho0 = 10.0;
    double factor = 10.0;
    int stages = 8;
    double inner_tol = 1e-12;      ///< on the gradient infinity norm
    int max_inner = 200000;

    std::vector<double> schedule() const {
        std::vector<double> rho;
        double r = rho0;
        for (int k = 0; k < stages; ++k, r *= factor) rho.push_back(r);
        return rho;
    }

    void validate() const {
        if (!(rho0 > 0.0) || !(factor > 1.0) || stages < 1 || max_inner < 1)
            throw std::invalid_argument("PenaltyConfig: schedule must be positive and strictly increasing");
    }
};

struct PenaltyResult {
    Vector q;
    double rho = 0.0;
    int inner_iterations = 0;     ///< summed over stages
    double max_violation = 0.0;   ///< of E q >= 0 (and E q <= u)
};

namespace detail {

struct PenaltyData {
    Matrix mass;
    Matrix elevation;
    Vector basis_integrals;   ///< integral of each basis function
};

inline PenaltyData penalty_data(const KktProblem& prob) {
    PenaltyData d;
    if (prob.dim == 1) {
        d.mass = mass_matrix(prob.m);
        d.elevation = elevation_matrix(prob.m, prob.n);
    } else {
        d.mass = simplex_mass_matrix(prob.dim, prob.m);
        d.elevation = simplex_elevation(prob.dim, prob.m, prob.n);
    }
    // basis functions sum to one, so row sums of M are their integrals
    d.basis_integrals = d.mass.rowwise().sum();
    return d;
}

} // namespace detail

/// Value of the penalized objective at q; fills grad and the generalized
/// Hessian (active penalty rows only).
inline double penalty_objective(const KktProblem& prob, const detail::PenaltyData& d, double rho, const Vector& q,
                                Vector* grad = nullptr, Matrix* hess = nullptr) {
    const Vector diff = q - prob.target;
    const Vector mdiff = d.mass * diff;
    const Vector eq = d.elevation * q;
    Vector viol = eq.cwiseMin(0.0);
    if (prob.upper) viol += (eq.array() - *prob.upper).max(0.0).matrix();
    const double h = prob.delta ? d.basis_integrals.dot(diff) : 0.0;
    const double f = diff.dot(mdiff) + rho * viol.squaredNorm() + rho * h * h;
    if (grad) {
        *grad = 2.0 * mdiff + 2.0 * rho * (d.elevation.transpose() * viol);
        if (prob.delta) *grad += 2.0 * rho * h * d.basis_integrals;
    }
    if (hess) {
        *hess = 2.0 * d.mass;
        for (Eigen::Index i = 0; i < eq.size(); ++i)
            if (eq[i] < 0.0 || (prob.upper && eq[i] > *prob.upper))
                *hess += 2.0 * rho * d.elevation.row(i).transpose() * d.elevation.row(i);
        if (prob.delta) *hess += 2.0 * rho * d.basis_integrals * d.basis_integrals.transpose();
    }
    return f;
}

/// Minimizes d_p(q) + rho sum max(0, -(Eq)_i)^2 [+ rho sum max(0, (Eq)_i - u)^2]
/// + rho delta (integral(q - p))^2 for each rho in the schedule, warm-started.
/// The inner loop is a damped semi-smooth Newton iteration on this piecewise
/// quadratic.
inline PenaltyResult penalty_solve(const KktProblem& prob, const PenaltyConfig& cfg = {}) {
    prob.validate();
    cfg.validate();
    if (prob.num_constraints() > 64) throw std::invalid_argument("penalty_solve: at most 64 constraints");
    const auto data = detail::penalty_data(prob);

    PenaltyResult res;
    res.q = prob.target;
    Vector g;
    Matrix h;
    for (const double rho : cfg.schedule()) {
        res.rho = rho;
        bool done = false;
        for (int it = 0; it < cfg.max_inner; ++it) {
            const double f = penalty_objective(prob, data, rho, res.q, &g, &h);
            ++res.inner_iterations;
            if (g.lpNorm<Eigen::Infinity>() <= cfg.inner_tol) {
                done = true;
                break;
            }
            const Vector step = -h.ldlt().solve(g);
            const double slope = g.dot(step);
            double t = 1.0;
            Vector trial = res.q + step;
            while (penalty_objective(prob, data, rho, trial) > f + 1e-4 * t * slope && t > 1e-20) {
                t *= 0.5;
                trial = res.q + t * step;
            }
            if ((trial - res.q).lpNorm<Eigen::Infinity>() <= 1e-16 * (1.0 + res.q.lpNorm<Eigen::Infinity>())) {
                // no representable progress left: the iterate is a minimizer to roundoff
                res.q = trial;
                done = true;
                break;
            }
            res.q = trial;
        }
        if (!done) throw stalled_error("penalty_solve: inner loop hit the iteration cap at rho=" + std::to_string(rho));
    }
    const Vector eq = data.elevation * res.q;
    res.max_violation = std::max(0.0, -eq.minCoeff());
    if (prob.upper) res.max_violation = std::max(res.max_violation, eq.maxCoeff() - *prob.upper);
    return res;
}

/// Central differences, one coordinate at a time.
inline Vector finite_diff_gradient(const std::function<double(const Vector&)>& f, const Vector& x, double h = 1e-6) {
    if (!(h >= 1e-8 && h <= 1e-4)) throw std::invalid_argument("finite_diff_gradient: h must lie in [1e-8, 1e-4]");
    Vector g(x.size());
    Vector xp = x;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double xi = x[i];
        xp[i] = xi + h;
        const double fp = f(xp);
        xp[i] = xi - h;
        const double fm = f(xp);
        xp[i] = xi;
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

} // namespace bernbound

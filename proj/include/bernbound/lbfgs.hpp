#pragma once

// Limited-memory BFGS with Armijo backtracking, used for the factorized cone
// problem.

#include <Eigen/Dense>

#include <cmath>
#include <deque>
#include <functional>
#include <vector>

namespace bernbound {

struct LbfgsOptions {
    int memory = 12;
    int max_iterations = 5000;
    double gradient_tol = 1e-10;
    double armijo = 1e-4;
    int max_backtracks = 60;
};

struct LbfgsResult {
    Eigen::VectorXd x;
    double value = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// `fg(x, grad)` returns f(x) and writes the gradient into `grad`.
using ValueAndGradient = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

inline LbfgsResult lbfgs_minimize(const ValueAndGradient& fg, Eigen::VectorXd x, const LbfgsOptions& opt = {}) {
    using Eigen::VectorXd;
    VectorXd g(x.size());
    double f = fg(x, g);
    std::deque<VectorXd> s_hist, y_hist;
    std::deque<double> rho_hist;

    LbfgsResult res;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        if (g.norm() <= opt.gradient_tol) break;

        // two-loop recursion
        VectorXd d = -g;
        std::vector<double> alpha(s_hist.size());
        for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
            alpha[static_cast<std::size_t>(i)] = rho_hist[static_cast<std::size_t>(i)] * s_hist[static_cast<std::size_t>(i)].dot(d);
            d -= alpha[static_cast<std::size_t>(i)] * y_hist[static_cast<std::size_t>(i)];
        }
        if (!s_hist.empty()) d *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
        for (std::size_t i = 0; i < s_hist.size(); ++i) {
            const double beta = rho_hist[i] * y_hist[i].dot(d);
            d += (alpha[i] - beta) * s_hist[i];
        }

        double slope = g.dot(d);
        if (!(slope < 0.0)) {
            s_hist.clear();
            y_hist.clear();
            rho_hist.clear();
            d = -g;
            slope = -g.squaredNorm();
        }

        double step = s_hist.empty() ? std::min(1.0, 1.0 / g.norm()) : 1.0;
        VectorXd xn(x.size()), gn(x.size());
        double fn = f;
        bool accepted = false;
        for (int b = 0; b < opt.max_backtracks; ++b) {
            xn = x + step * d;
            fn = fg(xn, gn);
            if (std::isfinite(fn) && fn <= f + opt.armijo * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        VectorXd s = xn - x;
        VectorXd y = gn - g;
        const double sy = s.dot(y);
        if (sy > 1e-300 * y.squaredNorm() && sy > 0.0) {
            s_hist.push_back(std::move(s));
            y_hist.push_back(std::move(y));
            rho_hist.push_back(1.0 / sy);
            if (static_cast<int>(s_hist.size()) > opt.memory) {
                s_hist.pop_front();
                y_hist.pop_front();
                rho_hist.pop_front();
            }
        }
        x = std::move(xn);
        g = std::move(gn);
        f = fn;
    }
    res.x = std::move(x);
    res.value = f;
    res.gradient_norm = g.norm();
    res.iterations = it;
    res.converged = res.gradient_norm <= opt.gradient_tol;
    return res;
}

} // namespace bernbound

#pragma once

// Exact univariate nonnegativity on [0,1] through the Hankel-structured
// parametrization of the cone of nonnegative polynomials:
//
//   m = 2l   : c = Omega0*(A) + Omega1*(B),  A in S^{l+1}_+, B in S^{l}_+
//   m = 2l+1 : c = Omega0*(A) + Omega1*(B),  A, B in S^{l+1}_+
//
// where c holds monomial coefficients. In polynomial terms, with
// v(x) = (1, x, ..., x^s):
//   even: v^T A v + x (1 - x) v^T B v,   odd: x v^T A v + (1 - x) v^T B v.

#include "bernstein.hpp"
#include "lbfgs.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

namespace bernbound {

/// Largest degree accepted by solve_cone; T^m is too ill-conditioned beyond.
inline constexpr int max_cone_degree = 12;

/// H_{ij} = 1 where i + j = k, for an s x s matrix; zero if k is out of range.
inline Matrix hankel_basis(int size, int k) {
    Matrix h = Matrix::Zero(size, size);
    for (int i = 0; i < size; ++i) {
        const int j = k - i;
        if (j >= 0 && j < size) h(i, j) = 1.0;
    }
    return h;
}

struct ConePoint {
    int m = 0;
    Matrix a;
    Matrix b;
};

inline int cone_size_a(int m) { return m / 2 + 1; }
inline int cone_size_b(int m) { return m % 2 == 0 ? m / 2 : m / 2 + 1; }

namespace detail {

/// sum_{i+j=k} X_ij = tr(X H^k); zero when k is out of range.
inline double antidiagonal_sum(const Matrix& x, int k) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const Eigen::Index j = k - i;
        if (j >= 0 && j < x.cols()) s += x(i, j);
    }
    return s;
}

} // namespace detail

/// Omega0*(A) + Omega1*(B): monomial coefficients of the polynomial the point generates.
inline Vector omega_adjoint(const ConePoint& pt) {
    const int m = pt.m;
    if (m < 0 || pt.a.rows() != cone_size_a(m) || pt.a.cols() != cone_size_a(m) || pt.b.rows() != cone_size_b(m) ||
        pt.b.cols() != cone_size_b(m))
        throw std::invalid_argument("omega_adjoint: matrix sizes do not match degree " + std::to_string(m));
    Vector c(m + 1);
    for (int k = 0; k <= m; ++k) {
        if (m % 2 == 0) {
            c[k] = detail::antidiagonal_sum(pt.a, k) + detail::antidiagonal_sum(pt.b, k - 1) -
                   detail::antidiagonal_sum(pt.b, k - 2);
        } else {
            c[k] = detail::antidiagonal_sum(pt.a, k - 1) + detail::antidiagonal_sum(pt.b, k) -
                   detail::antidiagonal_sum(pt.b, k - 1);
        }
    }
    return c;
}

/// (Omega0(q), Omega1(q)) for a monomial coefficient vector q of length m+1.
inline std::pair<Matrix, Matrix> omega_forward(int m, const Vector& q) {
    if (q.size() != m + 1) throw std::invalid_argument("omega_forward: q must have length m+1");
    const int l = m / 2;
    Matrix o0 = Matrix::Zero(cone_size_a(m), cone_size_a(m));
    Matrix o1 = Matrix::Zero(cone_size_b(m), cone_size_b(m));
    if (m % 2 == 0) {
        for (int k = 0; k <= 2 * l; ++k) o0 += q[k] * hankel_basis(l + 1, k);
        for (int k = 0; k <= 2 * l - 2; ++k) o1 += (q[k + 1] - q[k + 2]) * hankel_basis(l, k);
    } else {
        for (int k = 0; k <= 2 * l; ++k) {
            o0 += q[k + 1] * hankel_basis(l + 1, k);
            o1 += (q[k] - q[k + 1]) * hankel_basis(l + 1, k);
        }
    }
    return {o0, o1};
}

/// T^m: monomial coefficients to Bernstein coefficients, T_ij = C(i,j)/C(m,j), j <= i.
inline Matrix monomial_to_bernstein(int m) {
    if (m < 0) throw std::invalid_argument("monomial_to_bernstein: m must be nonnegative");
    Matrix t = Matrix::Zero(m + 1, m + 1);
    for (int i = 0; i <= m; ++i)
        for (int j = 0; j <= i; ++j) t(i, j) = binomial_real(i, j) / binomial_real(m, j);
    return t;
}

/// 2-norm condition number of T^m.
inline double monomial_to_bernstein_condition(int m) {
    Eigen::JacobiSVD<Matrix> svd(monomial_to_bernstein(m));
    const auto& s = svd.singularValues();
    return s[0] / s[s.size() - 1];
}

/// Bernstein coefficients of the polynomial a cone point generates.
inline Vector cone_bernstein(const ConePoint& pt) { return monomial_to_bernstein(pt.m) * omega_adjoint(pt); }

/// Smallest eigenvalue over both blocks (PSD check).
inline double cone_min_eigenvalue(const ConePoint& pt) {
    double lo = std::numeric_limits<double>::infinity();
    for (const Matrix* x : {&pt.a, &pt.b}) {
        if (x->size() == 0) continue;
        const Matrix sym = 0.5 * (*x + x->transpose());
        lo = std::min(lo, Eigen::SelfAdjointEigenSolver<Matrix>(sym, Eigen::EigenvaluesOnly).eigenvalues()[0]);
    }
    return lo;
}

/// d_p(T (Omega0*(R0 R0^T) + Omega1*(R1 R1^T))) as a function of the packed
/// factors x = [vec(R0); vec(R1)].
class ConeObjective {
public:
    ConeObjective(const Vector& target, const Matrix& mass)
        : m_(static_cast<int>(target.size()) - 1), target_(target), mass_(mass), t_(monomial_to_bernstein(m_)),
          sa_(cone_size_a(m_)), sb_(cone_size_b(m_)) {}

    int degree() const { return m_; }
    Eigen::Index num_variables() const { return sa_ * sa_ + sb_ * sb_; }

    ConePoint point(const Vector& x) const {
        const Eigen::Map<const Matrix> r0(x.data(), sa_, sa_);
        const Eigen::Map<const Matrix> r1(x.data() + sa_ * sa_, sb_, sb_);
        return ConePoint{m_, r0 * r0.transpose(), r1 * r1.transpose()};
    }

    double value(const Vector& x) const {
        Vector g(x.size());
        return (*this)(x, g);
    }

    double operator()(const Vector& x, Vector& grad) const {
        const Eigen::Map<const Matrix> r0(x.data(), sa_, sa_);
        const Eigen::Map<const Matrix> r1(x.data() + sa_ * sa_, sb_, sb_);
        const Vector q = t_ * omega_adjoint(ConePoint{m_, r0 * r0.transpose(), r1 * r1.transpose()});
        const Vector r = mass_ * (q - target_);
        const Vector gc = 2.0 * (t_.transpose() * r);
        const auto [o0, o1] = omega_forward(m_, gc);
        grad.resize(x.size());
        Eigen::Map<Matrix>(grad.data(), sa_, sa_) = 2.0 * o0 * r0;
        Eigen::Map<Matrix>(grad.data() + sa_ * sa_, sb_, sb_) = 2.0 * o1 * r1;
        return (q - target_).dot(r);
    }

    /// Exact Hessian with respect to the packed factors:
    /// 2 J^T M J + blockdiag(2 I (x) Omega0(g_c), 2 I (x) Omega1(g_c)), J = dq/dx.
    Matrix hessian(const Vector& x) const {
        const Eigen::Map<const Matrix> r0(x.data(), sa_, sa_);
        const Eigen::Map<const Matrix> r1(x.data() + sa_ * sa_, sb_, sb_);
        const auto nv = num_variables();
        Matrix jac(m_ + 1, nv);
        ConePoint dp{m_, Matrix::Zero(sa_, sa_), Matrix::Zero(sb_, sb_)};
        Eigen::Index col = 0;
        auto fill = [&](const Eigen::Map<const Matrix>& r, Matrix& slot) {
            const Eigen::Index s = r.rows();
            for (Eigen::Index j = 0; j < s; ++j)
                for (Eigen::Index i = 0; i < s; ++i) {
                    slot.setZero();
                    slot.row(i) += r.col(j).transpose();
                    slot.col(i) += r.col(j);
                    jac.col(col++) = t_ * omega_adjoint(dp);
                }
            slot.setZero();
        };
        fill(r0, dp.a);
        fill(r1, dp.b);
        Matrix h = 2.0 * jac.transpose() * mass_ * jac;
        const Vector q = t_ * omega_adjoint(ConePoint{m_, r0 * r0.transpose(), r1 * r1.transpose()});
        const Vector gc = 2.0 * (t_.transpose() * (mass_ * (q - target_)));
        const auto [o0, o1] = omega_forward(m_, gc);
        for (Eigen::Index j = 0; j < sa_; ++j) h.block(j * sa_, j * sa_, sa_, sa_) += 2.0 * o0;
        const Eigen::Index off = sa_ * sa_;
        for (Eigen::Index j = 0; j < sb_; ++j) h.block(off + j * sb_, off + j * sb_, sb_, sb_) += 2.0 * o1;
        return h;
    }

private:
    int m_;
    Vector target_;
    Matrix mass_;
    Matrix t_;
    Eigen::Index sa_;
    Eigen::Index sb_;
};

struct ConeOptions {
    int restarts = 5;
    std::uint64_t seed = 20201;
    LbfgsOptions lbfgs{};
    int newton_iterations = 200;      ///< damped Newton polish after L-BFGS
    int certify_max_elevation = 100;  ///< elevation budget for the exact-membership test
};

struct ConeResult {
    PolyCoeffs q;
    ConePoint point;
    double objective = 0.0;        ///< d_p(q)
    double fit_objective = 0.0;    ///< d_p of the certificate polynomial
    double gradient_norm = 0.0;
    int iterations = 0;
    int best_restart = 0;
    bool converged = false;
    bool target_in_cone = false;   ///< p itself certified nonnegative, so q = p
    double condition = 0.0;        ///< cond_2(T^m)
};

class cone_nonconverged_error : public std::runtime_error {
public:
    explicit cone_nonconverged_error(ConeResult best)
        : std::runtime_error("solve_cone: optimizer did not converge"), best_(std::move(best)) {}
    const ConeResult& best() const { return best_; }

private:
    ConeResult best_;
};

/// True if some elevation of p up to `max_extra` degrees has nonnegative coefficients.
inline bool certified_nonnegative(const Vector& c, int max_extra) {
    Vector e = c;
    for (int k = 0; k <= max_extra; ++k) {
        if (e.minCoeff() >= 0.0) return true;
        e = elevate_once(e);
    }
    return false;
}

/// Levenberg-Marquardt damped Newton on the factorized objective, started
/// from an L-BFGS iterate. L-BFGS alone crawls near minimizers where A or B
/// is rank deficient (the optimum touches zero), which is the typical case.
inline LbfgsResult newton_polish(const ConeObjective& obj, LbfgsResult start, int max_iterations, double gradient_tol) {
    Vector x = std::move(start.x);
    Vector g(x.size()), gn(x.size());
    double f = obj(x, g);
    double damping = -1.0;
    int it = 0;
    for (; it < max_iterations && g.norm() > gradient_tol; ++it) {
        const Matrix h = obj.hessian(x);
        if (damping < 0.0) damping = 1e-10 * std::max(1.0, h.diagonal().cwiseAbs().maxCoeff());
        bool accepted = false;
        while (damping < 1e30) {
            Matrix shifted = h;
            shifted.diagonal().array() += damping;
            Eigen::LLT<Matrix> llt(shifted);
            if (llt.info() == Eigen::Success) {
                const Vector d = -llt.solve(g);
                const Vector xn = x + d;
                const double fn = obj(xn, gn);
                // Near the optimum f is dominated by cancellation inside T^m (relative noise
                // up to ~1e-10 at m = 8), so a step that halves the gradient is accepted
                // unless f rises well above that noise.
                const bool armijo = fn <= f + 1e-4 * g.dot(d);
                const bool flat = fn <= f + 1e-8 * std::abs(f) && gn.norm() < 0.5 * g.norm();
                if (std::isfinite(fn) && (armijo || flat)) {
                    x = xn;
                    f = fn;
                    g = gn;
                    damping = std::max(damping * 0.1, 1e-16);
                    accepted = true;
                    break;
                }
            }
            damping *= 10.0;
        }
        if (!accepted) break;
    }
    start.x = std::move(x);
    start.value = f;
    start.gradient_norm = g.norm();
    start.iterations += it;
    start.converged = start.gradient_norm <= gradient_tol;
    return start;
}

/// Minimizes d_p(q) over nonnegative polynomials of the same degree as p.
///
/// The PSD blocks are factorized as R R^T and the factors are optimized by
/// L-BFGS (then a damped Newton polish) from `restarts` seeded random starts; the best objective wins, ties
/// going to the lower restart index. If p is already certifiably nonnegative
/// the minimizer is p itself and is returned exactly; the certificate is
/// still the optimized cone point. Throws cone_nonconverged_error (carrying
/// the best iterate) when the best restart fails the gradient test.
inline ConeResult solve_cone(const PolyCoeffs& p, const ConeOptions& opt = {}) {
    const int m = p.degree;
    if (m > max_cone_degree)
        throw std::invalid_argument("solve_cone: degree " + std::to_string(m) + " exceeds " +
                                    std::to_string(max_cone_degree));
    const Matrix mass = mass_matrix(m);
    const ConeObjective obj(p.coeffs, mass);
    const auto nv = obj.num_variables();

    // Scale the random start so the initial polynomial is comparable in size to p.
    const double scale = std::sqrt(std::max(p.coeffs.cwiseAbs().mean(), 1e-3) / cone_size_a(m));
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> normal(0.0, 1.0);

    ConeResult best;
    best.objective = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(1, opt.restarts); ++r) {
        Vector x0(nv);
        for (Eigen::Index i = 0; i < nv; ++i) x0[i] = scale * normal(rng);
        auto res = lbfgs_minimize([&obj](const Vector& x, Vector& g) { return obj(x, g); }, x0, opt.lbfgs);
        if (!res.converged && opt.newton_iterations > 0)
            res = newton_polish(obj, std::move(res), opt.newton_iterations, opt.lbfgs.gradient_tol);
        if (res.value < best.fit_objective || r == 0) {
            best.point = obj.point(res.x);
            best.fit_objective = res.value;
            best.objective = res.value;
            best.gradient_norm = res.gradient_norm;
            best.iterations = res.iterations;
            best.best_restart = r;
            best.converged = res.converged;
        }
    }
    best.q = PolyCoeffs(cone_bernstein(best.point));
    best.condition = monomial_to_bernstein_condition(m);
    if (certified_nonnegative(p.coeffs, opt.certify_max_elevation)) {
        best.target_in_cone = true;
        best.q = p;
        best.objective = 0.0;
    } else {
        best.objective = objective(mass, p.coeffs, best.q.coeffs);
    }
    if (!best.converged) throw cone_nonconverged_error(best);
    return best;
}

// ConePoint serialization: a header line followed by two CSV blocks.
//
//   cone_point m=<m>
//   A <rows>
//   <row>,<row>,...
//   B <rows>
//   ...

inline void write_cone_point(std::ostream& os, const ConePoint& pt) {
    os << "cone_point m=" << pt.m << '\n';
    auto block = [&os](const char* name, const Matrix& x) {
        os << name << ' ' << x.rows() << '\n';
        os << std::setprecision(17);
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            for (Eigen::Index j = 0; j < x.cols(); ++j) os << (j ? "," : "") << x(i, j);
            os << '\n';
        }
    };
    block("A", pt.a);
    block("B", pt.b);
}

inline ConePoint read_cone_point(std::istream& is) {
    ConePoint pt;
    std::string line;
    if (!std::getline(is, line) || line.rfind("cone_point m=", 0) != 0)
        throw std::invalid_argument("read_cone_point: missing header");
    pt.m = std::stoi(line.substr(13));
    auto block = [&is](char name, Matrix& x) {
        std::string hdr;
        if (!std::getline(is, hdr) || hdr.empty() || hdr[0] != name)
            throw std::invalid_argument(std::string("read_cone_point: missing block ") + name);
        const int rows = std::stoi(hdr.substr(2));
        x.resize(rows, rows);
        for (int i = 0; i < rows; ++i) {
            std::string row;
            std::getline(is, row);
            std::stringstream ss(row);
            std::string tok;
            for (int j = 0; j < rows; ++j) {
                if (!std::getline(ss, tok, ',')) throw std::invalid_argument("read_cone_point: short row");
                x(i, j) = std::stod(tok);
            }
        }
    };
    block('A', pt.a);
    block('B', pt.b);
    if (pt.a.rows() != cone_size_a(pt.m) || pt.b.rows() != cone_size_b(pt.m))
        throw std::invalid_argument("read_cone_point: block sizes do not match degree");
    return pt;
}

} // namespace bernbound

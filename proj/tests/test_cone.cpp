#include <bernbound/approx.hpp>
#include <bernbound/cone.hpp>
#include <bernbound/kkt.hpp>
#include <bernbound/reference.hpp>

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"

using namespace bernbound;

namespace {

double horner(const Vector& a, double x) {
    double s = 0.0;
    for (Eigen::Index k = a.size() - 1; k >= 0; --k) s = s * x + a[k];
    return s;
}

Matrix random_symmetric(std::mt19937& rng, Eigen::Index n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix x(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) x(i, j) = x(j, i) = g(rng);
    return x;
}

Matrix random_psd(std::mt19937& rng, Eigen::Index n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix r(n, n);
    for (Eigen::Index i = 0; i < r.size(); ++i) r.data()[i] = g(rng);
    return r * r.transpose();
}

Vector random_vector(std::mt19937& rng, Eigen::Index n) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = g(rng);
    return v;
}

// Bernstein coefficients of the degree-m polynomial by interpolation at
// m+1 nodes, an oracle independent of T^m.
Vector bernstein_fit(const std::function<double(double)>& f, int m) {
    Matrix v(m + 1, m + 1);
    Vector rhs(m + 1);
    for (int k = 0; k <= m; ++k) {
        const double x = m == 0 ? 0.5 : static_cast<double>(k) / m;
        for (int i = 0; i <= m; ++i) v(k, i) = oracle::bernstein(m, i, x);
        rhs[k] = f(x);
    }
    return v.fullPivLu().solve(rhs);
}

} // namespace

TEST(Hankel, Basis) {
    const Matrix h = hankel_basis(3, 2);
    Matrix want(3, 3);
    want << 0, 0, 1, 0, 1, 0, 1, 0, 0;
    EXPECT_EQ(h, want);
    EXPECT_EQ(hankel_basis(3, -1), Matrix::Zero(3, 3));
    EXPECT_EQ(hankel_basis(3, 5), Matrix::Zero(3, 3));
    EXPECT_EQ(hankel_basis(3, 4)(2, 2), 1.0);
}

TEST(OmegaAdjoint, QuadraticByHand) {
    const double a = 0.7, b = -0.2, c = 1.3, beta = 0.4;
    ConePoint pt{2, Matrix(2, 2), Matrix(1, 1)};
    pt.a << a, b, b, c;
    pt.b << beta;
    const Vector q = omega_adjoint(pt);
    ASSERT_EQ(q.size(), 3);
    EXPECT_DOUBLE_EQ(q[0], a);
    EXPECT_DOUBLE_EQ(q[1], 2 * b + beta);
    EXPECT_DOUBLE_EQ(q[2], c - beta);
    for (double x : {0.0, 0.13, 0.5, 0.91, 1.0}) {
        const double quad = a + 2 * b * x + c * x * x + beta * x * (1 - x);
        EXPECT_NEAR(horner(q, x), quad, 1e-15);
    }
}

TEST(OmegaAdjoint, SumOfSquares) {
    ConePoint pt{2, Matrix::Identity(2, 2), Matrix::Zero(1, 1)};
    const Vector q = omega_adjoint(pt);
    EXPECT_EQ(q, (Vector(3) << 1, 0, 1).finished());
}

TEST(OmegaAdjoint, ZeroOdd) {
    ConePoint pt{3, Matrix::Zero(2, 2), Matrix::Zero(2, 2)};
    EXPECT_EQ(omega_adjoint(pt), Vector::Zero(4));
}

TEST(OmegaAdjoint, SizeMismatch) {
    ConePoint pt{3, Matrix::Zero(2, 2), Matrix::Zero(1, 1)};
    EXPECT_THROW(omega_adjoint(pt), std::invalid_argument);
    ConePoint even{4, Matrix::Zero(3, 3), Matrix::Zero(3, 3)};
    EXPECT_THROW(omega_adjoint(even), std::invalid_argument);
}

TEST(OmegaAdjoint, PolynomialIdentityBothParities) {
    std::mt19937 rng(3);
    for (int m = 0; m <= 9; ++m) {
        ConePoint pt{m, random_symmetric(rng, cone_size_a(m)), random_symmetric(rng, cone_size_b(m))};
        const Vector q = omega_adjoint(pt);
        for (double x : {0.0, 0.21, 0.5, 0.77, 1.0}) {
            Vector va(cone_size_a(m)), vb(cone_size_b(m));
            for (Eigen::Index i = 0; i < va.size(); ++i) va[i] = std::pow(x, static_cast<double>(i));
            for (Eigen::Index i = 0; i < vb.size(); ++i) vb[i] = std::pow(x, static_cast<double>(i));
            const double qa = va.dot(pt.a * va), qb = vb.dot(pt.b * vb);
            const double want = m % 2 == 0 ? qa + x * (1 - x) * qb : x * qa + (1 - x) * qb;
            EXPECT_NEAR(horner(q, x), want, 1e-12 * (1 + std::abs(want))) << "m=" << m << " x=" << x;
        }
    }
}

TEST(OmegaForward, QuadraticByHand) {
    const Vector q = (Vector(3) << 0.3, -1.1, 2.0).finished();
    const auto [o0, o1] = omega_forward(2, q);
    Matrix want0(2, 2);
    want0 << 0.3, -1.1, -1.1, 2.0;
    EXPECT_EQ(o0, want0);
    ASSERT_EQ(o1.rows(), 1);
    EXPECT_DOUBLE_EQ(o1(0, 0), -1.1 - 2.0);
}

TEST(OmegaForward, Zero) {
    const auto [o0, o1] = omega_forward(2, Vector::Zero(3));
    EXPECT_EQ(o0, Matrix::Zero(2, 2));
    EXPECT_EQ(o1, Matrix::Zero(1, 1));
}

TEST(OmegaForward, AdjointPairing) {
    std::mt19937 rng(5);
    for (int m = 0; m <= 9; ++m) {
        for (int rep = 0; rep < 5; ++rep) {
            const Vector q = random_vector(rng, m + 1);
            const Matrix xa = random_symmetric(rng, cone_size_a(m));
            const Matrix xb = random_symmetric(rng, cone_size_b(m));
            const auto [o0, o1] = omega_forward(m, q);
            EXPECT_TRUE(o0.isApprox(o0.transpose()));
            EXPECT_TRUE(o1.isApprox(o1.transpose()));
            const double lhs0 = (o0 * xa).trace();
            const double rhs0 = q.dot(omega_adjoint(ConePoint{m, xa, Matrix::Zero(xb.rows(), xb.cols())}));
            EXPECT_NEAR(lhs0, rhs0, 1e-12 * (1 + std::abs(lhs0))) << "m=" << m;
            const double lhs1 = (o1 * xb).trace();
            const double rhs1 = q.dot(omega_adjoint(ConePoint{m, Matrix::Zero(xa.rows(), xa.cols()), xb}));
            EXPECT_NEAR(lhs1, rhs1, 1e-12 * (1 + std::abs(lhs1))) << "m=" << m;
        }
    }
}

TEST(OmegaForward, WrongLength) { EXPECT_THROW(omega_forward(3, Vector::Zero(3)), std::invalid_argument); }

TEST(MonomialToBernstein, Linear) {
    Matrix want(2, 2);
    want << 1, 0, 1, 1;
    EXPECT_EQ(monomial_to_bernstein(1), want);
}

TEST(MonomialToBernstein, QuadraticExamples) {
    const Matrix t = monomial_to_bernstein(2);
    const Vector x2 = t * (Vector(3) << 0, 0, 1).finished();
    EXPECT_EQ(x2, (Vector(3) << 0, 0, 1).finished());
    const Vector x1 = t * (Vector(3) << 0, 1, 0).finished();
    EXPECT_NEAR(x1[0], 0.0, 1e-16);
    EXPECT_NEAR(x1[1], 0.5, 1e-16);
    EXPECT_NEAR(x1[2], 1.0, 1e-16);
    EXPECT_THROW(monomial_to_bernstein(-1), std::invalid_argument);
}

TEST(MonomialToBernstein, PointwiseAgreement) {
    std::mt19937 rng(9);
    double prev_cond = 0.0;
    for (int m = 0; m <= 12; ++m) {
        const Vector a = random_vector(rng, m + 1);
        const Vector c = monomial_to_bernstein(m) * a;
        for (int k = 0; k <= 20; ++k) {
            const double x = k / 20.0;
            EXPECT_NEAR(oracle::bernstein_sum(c, x), horner(a, x), 1e-12 * (1 << m)) << "m=" << m;
        }
        const double cond = monomial_to_bernstein_condition(m);
        EXPECT_GE(cond, prev_cond);
        prev_cond = cond;
    }
    EXPECT_GT(prev_cond, 1e4);
}

TEST(ConeSoundness, RandomPsdPointsAreNonnegative) {
    std::mt19937 rng(21);
    for (int m = 0; m <= 10; ++m) {
        for (int rep = 0; rep < 10; ++rep) {
            ConePoint pt{m, random_psd(rng, cone_size_a(m)), random_psd(rng, cone_size_b(m))};
            ASSERT_GE(cone_min_eigenvalue(pt), -1e-10);
            const Vector a = omega_adjoint(pt);
            const double scale = a.lpNorm<Eigen::Infinity>();
            double lo = horner(a, 0.0);
            for (int k = 1; k < 10000; ++k) lo = std::min(lo, horner(a, k / 9999.0));
            EXPECT_GE(lo, -1e-9 * scale) << "m=" << m;
            // subdivision bound on the Bernstein form, with a small ladder for near-zero minima
            const Vector c = monomial_to_bernstein(m) * a;
            EXPECT_LE(bernstein_lower_bound(c, 8), lo + 1e-9 * scale);
            EXPECT_GE(bernstein_lower_bound(c, 8), -1e-3 * scale) << "m=" << m;
        }
    }
}

TEST(ConeCompleteness, SmallDegreesRecovered) {
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int m = 0; m <= 3; ++m) {
        for (int rep = 0; rep < 20; ++rep) {
            Vector a(m + 1);
            for (Eigen::Index i = 0; i < a.size(); ++i) a[i] = u(rng);
            // shift by the minimum over a fine grid (the minimum of a cubic is at a root of its derivative)
            double lo = horner(a, 0.0);
            for (int k = 1; k <= 100000; ++k) lo = std::min(lo, horner(a, k / 100000.0));
            a[0] -= lo;
            const PolyCoeffs p(monomial_to_bernstein(m) * a);
            try {
                const auto res = solve_cone(p);
                EXPECT_LE(res.fit_objective, 1e-6) << "m=" << m << " rep=" << rep;
                EXPECT_GE(cone_min_eigenvalue(res.point), -1e-10);
            } catch (const cone_nonconverged_error& e) {
                ADD_FAILURE() << "nonconverged m=" << m << " rep=" << rep << " fit=" << e.best().fit_objective;
            }
        }
    }
}

TEST(SolveCone, PositiveTargetReturnedExactly) {
    const PolyCoeffs p{0.5, 0.1, 0.2, 1.0};
    const auto res = solve_cone(p);
    EXPECT_TRUE(res.target_in_cone);
    EXPECT_LE((res.q.coeffs - p.coeffs).lpNorm<Eigen::Infinity>(), 1e-6);
    EXPECT_LE(res.fit_objective, 1e-10);
}

TEST(SolveCone, LinearMatchesKkt) {
    const PolyCoeffs p{-1.0, 1.0};
    const auto res = solve_cone(p);
    KktProblem prob;
    prob.m = prob.n = 1;
    prob.target = p.coeffs;
    const auto kkt = solve(prob);
    const double kkt_obj = objective(mass_matrix(1), p.coeffs, kkt.q);
    EXPECT_LE(res.objective, kkt_obj + 1e-10);
    EXPECT_LE((res.q.coeffs - kkt.q).lpNorm<Eigen::Infinity>(), 1e-5);
    EXPECT_GE(min_on_grid(res.q.coeffs), -1e-7);
}

TEST(SolveCone, PerfectSquare) {
    const PolyCoeffs p(bernstein_fit([](double x) { return (x - 0.5) * (x - 0.5); }, 2));
    EXPECT_NEAR(p[1], -0.25, 1e-14);
    const auto res = solve_cone(p);
    EXPECT_LE((res.q.coeffs - p.coeffs).lpNorm<Eigen::Infinity>(), 1e-6);
    EXPECT_LE(res.fit_objective, 1e-12);
}

TEST(SolveCone, PostconditionsOnNegativeTargets) {
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int m = 1; m <= 6; ++m) {
        Vector c(m + 1);
        for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = u(rng);
        const PolyCoeffs p(c);
        const auto res = solve_cone(p);
        EXPECT_TRUE(res.converged);
        EXPECT_GE(min_on_grid(res.q.coeffs), -1e-7) << "m=" << m;
        KktProblem prob;
        prob.m = prob.n = m;
        prob.target = c;
        const double lin = objective(mass_matrix(m), c, solve(prob).q);
        EXPECT_LE(res.objective, lin + 1e-6) << "m=" << m;
        EXPECT_NEAR(res.objective, res.fit_objective, 1e-12);
        EXPECT_GT(res.condition, 1.0);
    }
}

TEST(SolveCone, DominatesElevatedLinearOnCorpus) {
    const auto quad = composite_gauss();
    for (const char* id : {"f0", "f1", "f2", "f3"}) {
        const auto f = *find_target(id);
        for (int m = 1; m <= 5; ++m) {
            const auto p = project(f, m, quad);
            KktProblem prob;
            prob.m = m;
            prob.n = m + 10;
            prob.target = p.coeffs;
            const double lin = objective(mass_matrix(m), p.coeffs, solve(prob).q);
            const auto res = solve_cone(p);
            EXPECT_LE(res.objective, lin + 1e-5) << id << " m=" << m;
        }
    }
}

TEST(SolveCone, DegreeGuard) {
    EXPECT_THROW(solve_cone(PolyCoeffs(Vector::Ones(14))), std::invalid_argument);
    EXPECT_NO_THROW(solve_cone(PolyCoeffs(Vector::Ones(13))));
}

TEST(SolveCone, DeterministicForSeed) {
    const PolyCoeffs p{0.3, -0.8, 0.5, 0.2};
    const auto r1 = solve_cone(p);
    const auto r2 = solve_cone(p);
    EXPECT_EQ(r1.q.coeffs, r2.q.coeffs);
    EXPECT_EQ(r1.best_restart, r2.best_restart);
}

TEST(SolveCone, NonconvergedCarriesBestIterate) {
    ConeOptions opt;
    opt.restarts = 1;
    opt.lbfgs.max_iterations = 2;
    opt.newton_iterations = 0;
    const PolyCoeffs p{0.3, -0.8, 0.5, 0.2};
    try {
        solve_cone(p, opt);
        FAIL() << "expected nonconvergence";
    } catch (const cone_nonconverged_error& e) {
        EXPECT_FALSE(e.best().converged);
        EXPECT_EQ(e.best().q.degree, 3);
        EXPECT_TRUE(std::isfinite(e.best().objective));
    }
}

TEST(ConeObjective, GradientMatchesFiniteDifferences) {
    std::mt19937 rng(51);
    for (int m : {1, 2, 5, 8}) {
        const Vector target = random_vector(rng, m + 1);
        const ConeObjective obj(target, mass_matrix(m));
        const Vector x = random_vector(rng, obj.num_variables());
        Vector g;
        obj(x, g);
        const Vector fd = finite_diff_gradient([&obj](const Vector& y) { return obj.value(y); }, x);
        EXPECT_LE((g - fd).lpNorm<Eigen::Infinity>(), 1e-6 * (1 + g.lpNorm<Eigen::Infinity>())) << "m=" << m;
    }
}

TEST(ConeObjective, HessianMatchesGradientDifferences) {
    std::mt19937 rng(53);
    for (int m : {2, 3, 6}) {
        const Vector target = random_vector(rng, m + 1);
        const ConeObjective obj(target, mass_matrix(m));
        const Vector x = random_vector(rng, obj.num_variables());
        const Matrix h = obj.hessian(x);
        EXPECT_TRUE(h.isApprox(h.transpose(), 1e-12));
        const double step = 1e-6;
        for (Eigen::Index j = 0; j < x.size(); ++j) {
            Vector xp = x, xm = x, gp, gm;
            xp[j] += step;
            xm[j] -= step;
            obj(xp, gp);
            obj(xm, gm);
            const Vector col = (gp - gm) / (2 * step);
            EXPECT_LE((col - h.col(j)).lpNorm<Eigen::Infinity>(), 1e-5 * (1 + h.col(j).lpNorm<Eigen::Infinity>()));
        }
    }
}

TEST(ConePoint, RoundTrip) {
    std::mt19937 rng(61);
    for (int m : {0, 3, 4}) {
        ConePoint pt{m, random_psd(rng, cone_size_a(m)), random_psd(rng, cone_size_b(m))};
        std::stringstream ss;
        write_cone_point(ss, pt);
        const auto back = read_cone_point(ss);
        EXPECT_EQ(back.m, m);
        EXPECT_EQ(back.a, pt.a);
        EXPECT_EQ(back.b, pt.b);
    }
    std::stringstream bad("cone_point m=2\nA 2\n1,0\n0,1\nB 2\n1,0\n0,1\n");
    EXPECT_THROW(read_cone_point(bad), std::invalid_argument);
    std::stringstream nohdr("A 1\n1\n");
    EXPECT_THROW(read_cone_point(nohdr), std::invalid_argument);
}

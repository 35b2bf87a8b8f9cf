#include <bernbound/approx.hpp>
#include <bernbound/kkt.hpp>

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"

using namespace bernbound;

namespace {

const double pi = std::numbers::pi;

// Bernstein coefficients of a degree-m polynomial by interpolation at the
// nodes i/m, independent of the projection machinery.
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

TargetFunction expr(const std::string& s, int dim = 1) { return expression_target(s, dim); }

} // namespace

TEST(Quadrature, IntervalExactness) {
    const auto q = composite_gauss();
    EXPECT_EQ(q.design_degree, 47);
    for (int a = 0; a <= 47; ++a) {
        const double got = q.integrate([a](double x, double) { return std::pow(x, a); });
        EXPECT_NEAR(got, oracle::interval_monomial(a), 1e-13) << "a=" << a;
    }
}

TEST(Quadrature, TriangleExactness) {
    const auto q = collapsed_triangle();
    EXPECT_GE(q.design_degree, 20);
    for (int a = 0; a <= 24; ++a)
        for (int b = 0; a + b <= 24; ++b) {
            const double got = q.integrate([a, b](double x, double y) { return std::pow(x, a) * std::pow(y, b); });
            const double want = oracle::triangle_monomial(a, b);
            EXPECT_NEAR(got, want, 1e-13 * std::max(1.0, want)) << a << "," << b;
        }
}

TEST(Quadrature, GaussRuleSymmetry) {
    const auto g = gauss_legendre(7);
    double s = 0.0;
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        EXPECT_NEAR(g.nodes[i], -g.nodes[g.nodes.size() - 1 - i], 1e-15);
        s += g.weights[i];
    }
    EXPECT_NEAR(s, 2.0, 1e-14);
}

TEST(Moments, Constant) {
    const auto quad = composite_gauss();
    for (int m = 0; m <= 12; ++m) {
        const Vector v = moments(expr("1"), m, quad);
        for (int i = 0; i <= m; ++i) EXPECT_NEAR(v[i], 1.0 / (m + 1), 1e-14);
    }
}

TEST(Moments, Linear) {
    const Vector v = moments(expr("x"), 1, composite_gauss());
    EXPECT_NEAR(v[0], 1.0 / 6.0, 1e-15);
    EXPECT_NEAR(v[1], 1.0 / 3.0, 1e-15);
}

TEST(Moments, SineMean) {
    const Vector v = moments(*find_target("f0"), 0, composite_gauss());
    ASSERT_EQ(v.size(), 1);
    EXPECT_NEAR(v[0], 0.5, 1e-14);
}

TEST(Moments, AgreeWithAdaptiveSimpson) {
    const auto quad = composite_gauss();
    for (const auto& f : corpus()) {
        if (f.dim != 1) continue;
        const Vector v = moments(f, 6, quad);
        for (int i = 0; i <= 6; ++i) {
            const double want = oracle::simpson([&](double x) { return f(x) * oracle::bernstein(6, i, x); }, 0.0, 1.0);
            EXPECT_NEAR(v[i], want, 1e-12) << f.id << " i=" << i;
        }
    }
}

TEST(Project, ReproducesPolynomials) {
    const auto quad = composite_gauss();
    const auto f = expr("x^3 - 0.5*x + 0.25");
    for (int m = 3; m <= 10; ++m) {
        const auto p = project(f, m, quad);
        const Vector want = bernstein_fit([&f](double x) { return f(x); }, m);
        EXPECT_LE((p.coeffs - want).lpNorm<Eigen::Infinity>(), 1e-10) << "m=" << m;
    }
}

TEST(Project, SineConstant) {
    const auto p = project(*find_target("f0"), 0, composite_gauss());
    EXPECT_NEAR(p[0], 0.5, 1e-14);
}

TEST(Project, Orthogonality) {
    const auto quad = composite_gauss();
    for (const auto& f : corpus()) {
        if (f.dim != 1) continue;
        for (int m : {1, 4, 9, 14}) {
            const auto p = project(f, m, quad);
            for (int i = 0; i <= m; ++i) {
                const double r = quad.integrate(
                    [&](double x, double) { return (f(x) - evaluate(p, x)) * oracle::bernstein(m, i, x); });
                EXPECT_LE(std::abs(r), 1e-10) << f.id << " m=" << m << " i=" << i;
            }
        }
    }
}

TEST(Project, RationalTargetHasNonnegativeCoefficients) {
    const auto quad = composite_gauss();
    const auto f = *find_target("f1");
    for (int m = 1; m <= 8; ++m) {
        const auto p = project(f, m, quad);
        EXPECT_GE(p.coeffs.minCoeff(), 0.0) << "m=" << m;
    }
}

TEST(Project, Optimality) {
    std::mt19937 rng(71);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto quad = composite_gauss();
    for (const char* id : {"f0", "f2", "f3"}) {
        const auto f = *find_target(id);
        const int m = 5;
        const double best = l2_error(f, project(f, m, quad), quad);
        for (int k = 0; k < 20; ++k) {
            Vector c(m + 1);
            for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = u(rng);
            EXPECT_LE(best, l2_error(f, PolyCoeffs(c), quad) + 1e-12);
        }
    }
}

TEST(Project, TriangleReproducesPolynomials) {
    const auto quad = collapsed_triangle();
    const auto f = expr("x*y - 0.3*x^2 + y + 1", 2);
    for (int m = 2; m <= 4; ++m) {
        const auto p = simplex_project(f, m, quad);
        EXPECT_LE(l2_error(f, p, quad), 1e-10) << "m=" << m;
        for (const auto& pt : std::vector<std::vector<double>>{{0.1, 0.2}, {0.5, 0.5}, {0.0, 0.0}, {0.3, 0.6}})
            EXPECT_NEAR(simplex_evaluate(p, pt), f(pt[0], pt[1]), 1e-10);
    }
}

TEST(Project, TriangleOrthogonality) {
    const auto quad = collapsed_triangle();
    const auto f = *find_target("g2");
    const int m = 3;
    const auto p = simplex_project(f, m, quad);
    const auto idx = multiindices(2, m);
    for (std::size_t k = 0; k < idx.size(); ++k) {
        const auto& alpha = idx[k].entries;
        const double r = quad.integrate([&](double x, double y) {
            return (f(x, y) - simplex_evaluate(p, {x, y})) * oracle::simplex_bernstein(alpha, {x, y});
        });
        EXPECT_LE(std::abs(r), 1e-10);
    }
}

TEST(BernsteinOperator, Examples) {
    const auto c = bernstein_operator(expr("0.7"), 5);
    for (int i = 0; i <= 5; ++i) EXPECT_DOUBLE_EQ(c[i], 0.7);
    const auto s = bernstein_operator(*find_target("f0"), 1);
    EXPECT_NEAR(s[0], 0.5, 1e-15);
    EXPECT_NEAR(s[1], 0.5, 1e-15);
    const auto sq = bernstein_operator(expr("x^2"), 2);
    EXPECT_DOUBLE_EQ(sq[0], 0.0);
    EXPECT_DOUBLE_EQ(sq[1], 0.25);
    EXPECT_DOUBLE_EQ(sq[2], 1.0);
    EXPECT_DOUBLE_EQ(evaluate(sq, 0.5), 3.0 / 8.0);
    EXPECT_THROW(bernstein_operator(expr("x"), 0), std::invalid_argument);
}

TEST(BernsteinOperator, PreservesBounds) {
    for (const auto& f : corpus()) {
        if (f.dim != 1) continue;
        for (int m = 1; m <= 16; ++m) {
            const auto c = bernstein_operator(f, m);
            EXPECT_GE(c.coeffs.minCoeff(), f.lower) << f.id;
            EXPECT_LE(c.coeffs.maxCoeff(), f.upper) << f.id;
            EXPECT_GE(min_on_grid(c.coeffs, 2001), f.lower - 1e-15) << f.id;
        }
    }
}

TEST(P1Interpolant, Examples) {
    const auto lin = p1_interpolant(expr("2*x - 0.5"), 3);
    for (double x : {0.0, 0.1, 0.5, 0.77, 1.0}) EXPECT_NEAR(lin(x), 2 * x - 0.5, 1e-15);
    const auto s = p1_interpolant(*find_target("f0"), 2);
    ASSERT_EQ(s.values.size(), 3u);
    for (double v : s.values) EXPECT_NEAR(v, 0.5, 1e-15);
    EXPECT_THROW(p1_interpolant(expr("x"), 0), std::invalid_argument);
}

TEST(P1Interpolant, QuadraticErrorClosedForm) {
    // on a cell of width h the error is s (h - s), whose squared integral is h^5 / 30
    const auto quad = composite_gauss();
    for (int m : {1, 2, 4, 7}) {
        const double h = 1.0 / m;
        const double want = std::sqrt(m * std::pow(h, 5) / 30.0);
        EXPECT_NEAR(l2_error(expr("x^2"), p1_interpolant(expr("x^2"), m), quad), want, 1e-14) << "m=" << m;
    }
}

TEST(P1Interpolant, PreservesBounds) {
    for (const auto& f : corpus()) {
        if (f.dim != 1) continue;
        const auto p = p1_interpolant(f, 9);
        for (int k = 0; k <= 1000; ++k) {
            EXPECT_GE(p(k / 1000.0), f.lower);
            EXPECT_LE(p(k / 1000.0), f.upper);
        }
    }
}

TEST(L2Error, Examples) {
    const auto quad = composite_gauss();
    const auto f = expr("3*x^2 - x");
    EXPECT_LE(l2_error(f, PolyCoeffs(bernstein_fit([&f](double x) { return f(x); }, 2)), quad), 1e-13);
    EXPECT_NEAR(l2_error(*find_target("f0"), PolyCoeffs{0.5}, quad), 1.0 / (2.0 * std::sqrt(2.0)), 1e-14);
}

TEST(L2Error, Pythagoras) {
    std::mt19937 rng(73);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const auto quad = composite_gauss();
    for (const auto& f : corpus()) {
        if (f.dim != 1) continue;
        for (int m : {2, 6}) {
            const auto p = project(f, m, quad);
            const double base = l2_error(f, p, quad);
            Vector c(m + 1);
            for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = u(rng);
            const double lhs = std::pow(l2_error(f, PolyCoeffs(c), quad), 2);
            const double rhs = base * base + objective(mass_matrix(m), p.coeffs, c);
            EXPECT_NEAR(lhs, rhs, 1e-10) << f.id << " m=" << m;
        }
    }
}

TEST(L2Error, SurrogateOrderingMatches) {
    // minimizing the coefficient distance to p* is minimizing the L2 error
    std::mt19937 rng(79);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto quad = composite_gauss();
    const auto f = *find_target("f0");
    const int m = 4;
    const auto p = project(f, m, quad);
    const double base = std::pow(l2_error(f, p, quad), 2);
    for (int k = 0; k < 20; ++k) {
        Vector a(m + 1), b(m + 1);
        for (Eigen::Index i = 0; i <= m; ++i) {
            a[i] = u(rng);
            b[i] = u(rng);
        }
        const double da = objective(mass_matrix(m), p.coeffs, a), db = objective(mass_matrix(m), p.coeffs, b);
        const double ea = std::pow(l2_error(f, PolyCoeffs(a), quad), 2), eb = std::pow(l2_error(f, PolyCoeffs(b), quad), 2);
        EXPECT_NEAR(ea - base, da, 1e-10);
        EXPECT_NEAR((ea - eb) - (da - db), 0.0, 1e-10);
    }
}

TEST(L2Error, ErrorOrderingOnRationalTarget) {
    const auto quad = composite_gauss();
    const auto f = *find_target("f1");
    for (int m = 2; m <= 8; ++m) {
        const auto p = project(f, m, quad);
        KktProblem prob;
        prob.m = prob.n = m;
        prob.target = p.coeffs;
        const double e_proj = l2_error(f, p, quad);
        const double e_kkt = l2_error(f, PolyCoeffs(solve(prob).q), quad);
        const double e_bern = l2_error(f, bernstein_operator(f, m), quad);
        EXPECT_LE(e_proj, e_kkt + 1e-15) << "m=" << m;
        EXPECT_LE(e_kkt, e_bern + 1e-12) << "m=" << m;
    }
}

TEST(Corpus, Formulas) {
    const auto f = [](const char* id) { return *find_target(id); };
    EXPECT_NEAR(f("f0")(0.0), 0.5, 1e-15);
    EXPECT_NEAR(f("f0")(0.25), 1.0, 1e-15);
    EXPECT_NEAR(f("f0")(0.75), 0.0, 1e-15);
    EXPECT_NEAR(f("f1")(1.0), 0.51, 1e-15);
    EXPECT_NEAR(f("f1")(0.5), 0.01 + 0.5 / 1.25, 1e-15);
    EXPECT_NEAR(f("f2")(0.5), 26.0 / 25.0 - 1.0 / 26.0, 1e-15);
    EXPECT_NEAR(f("f2")(0.0), 1.0 / 25.0 - 1.0 / 26.0, 1e-15);
    EXPECT_NEAR(f("f2c")(0.0), 0.0, 1e-15);
    EXPECT_NEAR(f("f2c")(1.0), 0.0, 1e-15);
    EXPECT_NEAR(f("f2c")(0.5), 1.0, 1e-15);
    EXPECT_NEAR(f("f3")(0.5), pi / 2, 1e-15);
    EXPECT_NEAR(f("f3")(1.0), pi / 2 + std::atan(15.0), 1e-15);
    EXPECT_NEAR(f("g0")(0.0, 0.0), 0.5, 1e-15);
    EXPECT_NEAR(f("g0")(0.0, 0.5), 1.0, 1e-15);
    EXPECT_NEAR(f("g1")(1.0, 0.0), 0.51, 1e-15);
    EXPECT_NEAR(f("g1")(0.0, 1.0), 0.01, 1e-15);
    EXPECT_NEAR(f("g2")(0.3, 0.3), 1.0, 1e-15);
    EXPECT_FALSE(find_target("f9"));
    int dims[3] = {0, 0, 0};
    for (const auto& t : corpus()) ++dims[t.dim];
    EXPECT_EQ(dims[1], 5);
    EXPECT_EQ(dims[2], 3);
}

TEST(Corpus, BoundsHoldOnDomain) {
    const auto quad2 = collapsed_triangle(6, 2);
    for (const auto& f : corpus()) {
        if (f.dim == 1) {
            for (int k = 0; k <= 10000; ++k) {
                EXPECT_GE(f(k / 10000.0), f.lower) << f.id;
                EXPECT_LE(f(k / 10000.0), f.upper) << f.id;
            }
        } else {
            for (std::size_t k = 0; k < quad2.size(); ++k) {
                EXPECT_GE(f(quad2.x[k], quad2.y[k]), f.lower) << f.id;
                EXPECT_LE(f(quad2.x[k], quad2.y[k]), f.upper) << f.id;
            }
        }
    }
}

TEST(Expression, Evaluation) {
    EXPECT_DOUBLE_EQ(parse_expression("1 + 2*3")(0, 0), 7.0);
    EXPECT_DOUBLE_EQ(parse_expression("-2^2")(0, 0), -4.0);
    EXPECT_DOUBLE_EQ(parse_expression("2^3^2")(0, 0), 512.0);
    EXPECT_DOUBLE_EQ(parse_expression("(1 - x) / 4")(0.5, 0), 0.125);
    EXPECT_DOUBLE_EQ(parse_expression("x*y - y")(2.0, 3.0), 3.0);
    EXPECT_NEAR(parse_expression("sin(pi*x)^2 + cos(0) + atan(1)")(0.5, 0), 2.0 + pi / 4, 1e-15);
    EXPECT_DOUBLE_EQ(parse_expression("2e-1 + .5")(0, 0), 0.7);
}

TEST(Expression, Errors) {
    for (const char* bad : {"", "x +", "sin(x", "foo(x)", "(1", "1 2", "sin x", "x ^"})
        EXPECT_THROW(parse_expression(bad), expression_error) << bad;
}

#pragma once

// Univariate Bernstein polynomials on [0,1]. The spectral factors of the mass
// matrix come from Legendre polynomials written in the Bernstein basis.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bernbound {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

class overflow_error : public std::overflow_error {
public:
    using std::overflow_error::overflow_error;
};

/// Exact binomial coefficient; zero outside 0 <= k <= n. Throws for n > 62.
inline std::uint64_t binomial(int n, int k) {
    if (n < 0) throw std::invalid_argument("binomial: n must be nonnegative");
    if (n > 62) throw overflow_error("binomial: n > 62 exceeds exact integer range");
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 r = 1;
    for (int i = 0; i < k; ++i) r = r * static_cast<unsigned>(n - i) / static_cast<unsigned>(i + 1);
    return static_cast<std::uint64_t>(r);
}

/// Binomial coefficient in floating point via the multiplicative recurrence.
/// Exact while the result fits in 53 bits, correctly scaled beyond.
inline double binomial_real(int n, int k) {
    if (k < 0 || k > n || n < 0) return 0.0;
    if (k > n - k) k = n - k;
    double r = 1.0;
    for (int i = 0; i < k; ++i) r = r * static_cast<double>(n - i) / static_cast<double>(i + 1);
    return r;
}

/// Bernstein coefficients of a univariate polynomial of degree `degree`.
struct PolyCoeffs {
    int degree = 0;
    Vector coeffs = Vector::Zero(1);

    PolyCoeffs() = default;
    explicit PolyCoeffs(Vector c) : degree(static_cast<int>(c.size()) - 1), coeffs(std::move(c)) {
        if (coeffs.size() == 0) throw std::invalid_argument("PolyCoeffs: empty coefficient vector");
    }
    PolyCoeffs(std::initializer_list<double> c) : PolyCoeffs(Vector(Eigen::Map<const Vector>(c.begin(), c.size()))) {}

    Eigen::Index size() const { return coeffs.size(); }
    double operator[](Eigen::Index i) const { return coeffs[i]; }
};

/// de Casteljau evaluation; x may lie outside [0,1].
inline double evaluate(const Vector& c, double x) {
    std::vector<double> b(c.data(), c.data() + c.size());
    const double s = 1.0 - x;
    for (std::size_t r = 1; r < b.size(); ++r)
        for (std::size_t i = 0; i + r < b.size(); ++i) b[i] = s * b[i] + x * b[i + 1];
    return b.front();
}

inline double evaluate(const PolyCoeffs& p, double x) { return evaluate(p.coeffs, x); }

/// B^n_i(x) directly from the product formula (used for fixtures and moments).
inline double bernstein_basis(int n, int i, double x) {
    if (i < 0 || i > n) return 0.0;
    return binomial_real(n, i) * std::pow(x, i) * std::pow(1.0 - x, n - i);
}

/// E^{m,n}: maps degree-m coefficients to degree-n coefficients.
inline Matrix elevation_matrix(int m, int n) {
    if (m < 0 || m > n) throw std::invalid_argument("elevation_matrix: requires 0 <= m <= n");
    Matrix e = Matrix::Zero(n + 1, m + 1);
    for (int i = 0; i <= n; ++i) {
        const double cni = binomial_real(n, i);
        for (int j = std::max(0, i - (n - m)); j <= std::min(i, m); ++j)
            e(i, j) = binomial_real(m, j) * binomial_real(n - m, i - j) / cni;
    }
    return e;
}

/// One elevation step k -> k+1.
inline Vector elevate_once(const Vector& c) {
    const auto k = c.size() - 1;
    Vector out(k + 2);
    out[0] = c[0];
    out[k + 1] = c[k];
    for (Eigen::Index i = 1; i <= k; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(k + 1);
        out[i] = t * c[i - 1] + (1.0 - t) * c[i];
    }
    return out;
}

inline Vector elevate(const Vector& c, int n) {
    if (n < c.size() - 1) throw std::invalid_argument("elevate: target degree below source degree");
    Vector out = c;
    while (out.size() - 1 < n) out = elevate_once(out);
    return out;
}

inline PolyCoeffs elevate(const PolyCoeffs& p, int n) { return PolyCoeffs(elevate(p.coeffs, n)); }

/// Bernstein mass matrix M^n, M_ij = C(n,i) C(n,j) / ((2n+1) C(2n, i+j)).
inline Matrix mass_matrix(int n) {
    if (n < 0) throw std::invalid_argument("mass_matrix: n must be nonnegative");
    std::vector<double> row(n + 1), diag(2 * n + 1);
    for (int i = 0; i <= n; ++i) row[i] = binomial_real(n, i);
    for (int k = 0; k <= 2 * n; ++k) diag[k] = binomial_real(2 * n, k);
    Matrix m(n + 1, n + 1);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) m(i, j) = row[i] * row[j] / ((2.0 * n + 1.0) * diag[i + j]);
    return m;
}

/// Bernstein coefficients of the shifted Legendre polynomial L^j with L^j(1) = 1.
inline PolyCoeffs legendre_bernstein_coeffs(int j) {
    if (j < 0) throw std::invalid_argument("legendre_bernstein_coeffs: j must be nonnegative");
    Vector c(j + 1);
    for (int i = 0; i <= j; ++i) c[i] = ((j + i) % 2 == 0 ? 1.0 : -1.0) * binomial_real(j, i);
    return PolyCoeffs(std::move(c));
}

/// Eigenvalue j of M^n: (n!)^2 / ((n+j+1)! (n-j)!).
inline double mass_eigenvalue(int n, int j) {
    double v = 1.0 / (n + j + 1.0);
    for (int k = 0; k < j; ++k) v *= static_cast<double>(n - k) / static_cast<double>(n + k + 1);
    return v;
}

/// Spectral factors of the degree-n mass matrix restricted to degree m.
///
/// Column j of `u` is sqrt(2j+1) E^{j,n} Pi(L^j); `eigenvalues` holds
/// lambda^n_j for j = 0..m and `w` = U U^T / 2. With m = n, Q = U diag(sqrt(lambda))
/// is orthogonal and M^n = Q diag(lambda) Q^T. In general
/// E^{m,n} (M^m)^{-1} (E^{m,n})^T = U U^T.
struct SpectralFactors {
    int m = 0;
    int n = 0;
    Vector eigenvalues;
    Matrix u;
    Matrix w;
};

inline SpectralFactors spectral_factors(int m, int n) {
    if (m < 0 || m > n) throw std::invalid_argument("spectral_factors: requires 0 <= m <= n");
    SpectralFactors f;
    f.m = m;
    f.n = n;
    f.eigenvalues.resize(m + 1);
    f.u.resize(n + 1, m + 1);
    for (int j = 0; j <= m; ++j) {
        f.eigenvalues[j] = mass_eigenvalue(n, j);
        f.u.col(j) = std::sqrt(2.0 * j + 1.0) * elevate(legendre_bernstein_coeffs(j).coeffs, n);
    }
    f.w = 0.5 * f.u * f.u.transpose();
    return f;
}

/// Least-squares solution of E^{m,n} x = y through the spectral form
/// U^{m,m} diag(lambda^n) (U^{m,n})^T y.
inline PolyCoeffs downgrade(const SpectralFactors& low, const SpectralFactors& high, const Vector& y) {
    if (low.m != low.n || low.m != high.m) throw std::invalid_argument("downgrade: factor degrees mismatch");
    if (y.size() != high.n + 1) throw std::invalid_argument("downgrade: y has wrong length");
    return PolyCoeffs(low.u * (high.eigenvalues.asDiagonal() * (high.u.transpose() * y)));
}

inline PolyCoeffs downgrade(int m, int n, const Vector& y) {
    return downgrade(spectral_factors(m, m), spectral_factors(m, n), y);
}

/// Exact L2 inner product on [0,1] through the mass-matrix bilinear form.
inline double l2_inner(const PolyCoeffs& p, const PolyCoeffs& q) {
    const int n = std::max(p.degree, q.degree);
    const Vector a = elevate(p.coeffs, n);
    const Vector b = elevate(q.coeffs, n);
    return a.dot(mass_matrix(n) * b);
}

inline double l2_norm(const PolyCoeffs& p) { return std::sqrt(std::max(0.0, l2_inner(p, p))); }

/// d_p(q) = (q - p)^T M (q - p), the squared L2 distance in coefficient space.
inline double objective(const Matrix& mass, const Vector& target, const Vector& q) {
    const Vector diff = q - target;
    return diff.dot(mass * diff);
}

/// Exact integral over [0,1]: mean of the Bernstein coefficients.
inline double integral(const PolyCoeffs& p) { return p.coeffs.mean(); }

/// Split p at t = 1/2 by de Casteljau; returns the coefficients of both halves.
inline std::pair<Vector, Vector> subdivide(const Vector& c) {
    const auto n = c.size();
    std::vector<double> b(c.data(), c.data() + n);
    Vector left(n), right(n);
    left[0] = b[0];
    right[n - 1] = b[n - 1];
    for (Eigen::Index r = 1; r < n; ++r) {
        for (Eigen::Index i = 0; i + r < n; ++i) b[i] = 0.5 * (b[i] + b[i + 1]);
        left[r] = b[0];
        right[n - 1 - r] = b[n - 1 - r];
    }
    return {left, right};
}

/// Certified lower bound on min_[0,1] p via the convex-hull property after
/// `levels` rounds of uniform subdivision.
inline double bernstein_lower_bound(const Vector& c, int levels = 1) {
    if (levels <= 0) return c.minCoeff();
    auto [l, r] = subdivide(c);
    return std::min(bernstein_lower_bound(l, levels - 1), bernstein_lower_bound(r, levels - 1));
}

/// Minimum of p over an equispaced grid of `points` nodes on [0,1].
inline double min_on_grid(const Vector& c, int points = 10000) {
    double lo = evaluate(c, 0.0);
    for (int k = 1; k < points; ++k) lo = std::min(lo, evaluate(c, static_cast<double>(k) / (points - 1)));
    return lo;
}

} // namespace bernbound

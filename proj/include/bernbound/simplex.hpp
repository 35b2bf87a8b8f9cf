#pragma once

// Bernstein polynomials on the unit right simplex S_d = conv{0, e_1, ..., e_d}.
//
// Barycentric coordinates are b_0 = 1 - sum(x_i) and b_i = x_i. Multiindices
// of a given order are enumerated in reverse-lexicographic order on
// (alpha_0, ..., alpha_d), so that d = 1 reproduces the univariate i = 0..n
// ordering with alpha = (n - i, i).

#include "bernstein.hpp"

#include <map>
#include <numeric>
#include <vector>

namespace bernbound {

struct MultiIndex {
    std::vector<int> entries;

    int order() const { return std::accumulate(entries.begin(), entries.end(), 0); }
    int size() const { return static_cast<int>(entries.size()); }
    int operator[](int i) const { return entries[static_cast<std::size_t>(i)]; }
    friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
    friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;
};

namespace detail {

inline void enumerate_multiindices(std::vector<int>& cur, int pos, int remaining, std::vector<MultiIndex>& out) {
    if (pos + 1 == static_cast<int>(cur.size())) {
        cur[pos] = remaining;
        out.push_back(MultiIndex{cur});
        return;
    }
    for (int a = remaining; a >= 0; --a) {
        cur[pos] = a;
        enumerate_multiindices(cur, pos + 1, remaining - a, out);
    }
}

inline double factorial(int k) {
    double r = 1.0;
    for (int i = 2; i <= k; ++i) r *= i;
    return r;
}

} // namespace detail

/// All multiindices of length d+1 and order n, in canonical order.
inline std::vector<MultiIndex> multiindices(int d, int n) {
    if (d < 1 || n < 0) throw std::invalid_argument("multiindices: requires d >= 1 and n >= 0");
    std::vector<MultiIndex> out;
    std::vector<int> cur(static_cast<std::size_t>(d + 1), 0);
    detail::enumerate_multiindices(cur, 0, n, out);
    return out;
}

/// Number of Bernstein polynomials of degree n on S_d.
inline int simplex_dim(int d, int n) { return static_cast<int>(binomial(d + n, d)); }

/// alpha! = prod alpha_i! (the factorial of each entry, not the bare product).
inline double multiindex_factorial(const MultiIndex& a) {
    double r = 1.0;
    for (int v : a.entries) r *= detail::factorial(v);
    return r;
}

/// Canonical multiindex list with reverse lookup.
class MultiIndexSet {
public:
    MultiIndexSet(int d, int n) : d_(d), n_(n), list_(multiindices(d, n)) {
        for (std::size_t k = 0; k < list_.size(); ++k) index_.emplace(list_[k].entries, static_cast<int>(k));
    }

    int dim() const { return d_; }
    int degree() const { return n_; }
    int size() const { return static_cast<int>(list_.size()); }
    const MultiIndex& operator[](int k) const { return list_[static_cast<std::size_t>(k)]; }
    const std::vector<MultiIndex>& list() const { return list_; }

    /// Position of alpha, or -1 if it is not in the set.
    int find(const std::vector<int>& alpha) const {
        auto it = index_.find(alpha);
        return it == index_.end() ? -1 : it->second;
    }

private:
    int d_;
    int n_;
    std::vector<MultiIndex> list_;
    std::map<std::vector<int>, int> index_;
};

/// Header row naming each coefficient, e.g. "a(2,0,0),a(1,1,0),...".
inline std::string multiindex_header(int d, int n) {
    std::string s;
    for (const auto& a : multiindices(d, n)) {
        if (!s.empty()) s += ',';
        s += "a(";
        for (int i = 0; i < a.size(); ++i) s += (i ? "," : "") + std::to_string(a[i]);
        s += ')';
    }
    return s;
}

struct SimplexPoly {
    int dim = 1;
    int degree = 0;
    Vector coeffs = Vector::Ones(1);

    SimplexPoly() = default;
    SimplexPoly(int d, int n, Vector c) : dim(d), degree(n), coeffs(std::move(c)) {
        if (coeffs.size() != simplex_dim(d, n)) throw std::invalid_argument("SimplexPoly: coefficient count mismatch");
    }
};

inline std::vector<double> barycentric(const std::vector<double>& x) {
    std::vector<double> b(x.size() + 1);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        b[i + 1] = x[i];
        s += x[i];
    }
    b[0] = 1.0 - s;
    return b;
}

/// Multivariate de Casteljau evaluation at a Cartesian point x in R^d.
inline double simplex_evaluate(const SimplexPoly& p, const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != p.dim) throw std::invalid_argument("simplex_evaluate: point dimension mismatch");
    const auto b = barycentric(x);
    Vector cur = p.coeffs;
    for (int r = p.degree; r > 0; --r) {
        const MultiIndexSet upper(p.dim, r);
        const auto lower = multiindices(p.dim, r - 1);
        Vector next(static_cast<Eigen::Index>(lower.size()));
        for (std::size_t k = 0; k < lower.size(); ++k) {
            double v = 0.0;
            auto alpha = lower[k].entries;
            for (int i = 0; i <= p.dim; ++i) {
                ++alpha[static_cast<std::size_t>(i)];
                v += b[static_cast<std::size_t>(i)] * cur[upper.find(alpha)];
                --alpha[static_cast<std::size_t>(i)];
            }
            next[static_cast<Eigen::Index>(k)] = v;
        }
        cur = std::move(next);
    }
    return cur[0];
}

/// Single elevation step m -> m+1 as a dense C(d+m+1,d) x C(d+m,d) matrix.
inline Matrix simplex_elevation_step(int d, int m) {
    const MultiIndexSet from(d, m);
    const auto to = multiindices(d, m + 1);
    Matrix e = Matrix::Zero(static_cast<Eigen::Index>(to.size()), from.size());
    for (std::size_t r = 0; r < to.size(); ++r) {
        auto alpha = to[r].entries;
        for (int j = 0; j <= d; ++j) {
            if (alpha[static_cast<std::size_t>(j)] == 0) continue;
            const double w = static_cast<double>(alpha[static_cast<std::size_t>(j)]) / (m + 1.0);
            --alpha[static_cast<std::size_t>(j)];
            e(static_cast<Eigen::Index>(r), from.find(alpha)) = w;
            ++alpha[static_cast<std::size_t>(j)];
        }
    }
    return e;
}

/// E^{d,m,n}, assembled as a product of single-step elevations.
inline Matrix simplex_elevation(int d, int m, int n) {
    if (m < 0 || m > n) throw std::invalid_argument("simplex_elevation: requires 0 <= m <= n");
    Matrix e = Matrix::Identity(simplex_dim(d, m), simplex_dim(d, m));
    for (int k = m; k < n; ++k) e = simplex_elevation_step(d, k) * e;
    return e;
}

/// M^{d,n}: (n!)^2 (alpha+beta)! / (alpha! beta! (2n+d)!), integrated over S_d.
inline Matrix simplex_mass_matrix(int d, int n) {
    const auto idx = multiindices(d, n);
    const auto sz = static_cast<Eigen::Index>(idx.size());
    const double nf = detail::factorial(n);
    const double denom = detail::factorial(2 * n + d);
    std::vector<double> scaled(idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) scaled[k] = nf / multiindex_factorial(idx[k]);
    Matrix m(sz, sz);
    for (Eigen::Index a = 0; a < sz; ++a) {
        for (Eigen::Index b = a; b < sz; ++b) {
            double num = 1.0;
            for (int i = 0; i <= d; ++i)
                num *= detail::factorial(idx[static_cast<std::size_t>(a)][i] + idx[static_cast<std::size_t>(b)][i]);
            m(a, b) = m(b, a) = scaled[static_cast<std::size_t>(a)] * scaled[static_cast<std::size_t>(b)] * num / denom;
        }
    }
    return m;
}

/// lambda^{d,n}_j = (n!)^2 / ((n+j+d)! (n-j)!), multiplicity C(d+j-1, d-1).
inline double simplex_mass_eigenvalue(int d, int n, int j) {
    double v = 1.0;
    for (int k = 0; k < j; ++k) v *= static_cast<double>(n - k) / static_cast<double>(n + k + 1);
    for (int k = j + 1; k <= j + d; ++k) v /= static_cast<double>(n + k);
    return v;
}

inline int eigenvalue_multiplicity(int d, int j) { return j == 0 ? 1 : static_cast<int>(binomial(d + j - 1, d - 1)); }

/// Bernstein coefficients (degree j) of an M^{d,j}-orthonormal basis of the
/// polynomials of degree j orthogonal to all polynomials of degree < j.
///
/// Built by modified Gram-Schmidt (two passes) in the M^{d,j} inner product
/// against the elevated degree-(j-1) space. Candidates are unit coefficient
/// vectors, those with alpha_0 = 0 first.
inline Matrix orthogonal_complement_basis(int d, int j) {
    if (j < 0) throw std::invalid_argument("orthogonal_complement_basis: j must be nonnegative");
    const Matrix mass = simplex_mass_matrix(d, j);
    if (j == 0) return Matrix::Constant(1, 1, 1.0 / std::sqrt(mass(0, 0)));

    const int want = eigenvalue_multiplicity(d, j);
    const int total = simplex_dim(d, j);
    std::vector<Vector> basis;
    auto m_dot = [&mass](const Vector& a, const Vector& b) { return a.dot(mass * b); };
    auto orthogonalize = [&](Vector v) {
        for (int pass = 0; pass < 2; ++pass)
            for (const auto& q : basis) v -= m_dot(q, v) * q;
        return v;
    };

    const Matrix lower = simplex_elevation(d, j - 1, j);
    for (Eigen::Index c = 0; c < lower.cols(); ++c) {
        Vector v = orthogonalize(lower.col(c));
        const double nv = std::sqrt(m_dot(v, v));
        if (nv <= 1e-12 * std::sqrt(m_dot(lower.col(c), lower.col(c))))
            throw std::runtime_error("orthogonal_complement_basis: elevated lower-degree basis is rank deficient");
        basis.push_back(v / nv);
    }

    const auto idx = multiindices(d, j);
    std::vector<int> order;
    for (int k = 0; k < total; ++k)
        if (idx[static_cast<std::size_t>(k)][0] == 0) order.push_back(k);
    for (int k = 0; k < total; ++k)
        if (idx[static_cast<std::size_t>(k)][0] != 0) order.push_back(k);

    Matrix out(total, want);
    int found = 0;
    for (int k : order) {
        if (found == want) break;
        const Vector e = Vector::Unit(total, k);
        Vector v = orthogonalize(e);
        const double nv = std::sqrt(m_dot(v, v));
        if (nv <= 1e-8 * std::sqrt(m_dot(e, e))) continue;
        v /= nv;
        basis.push_back(v);
        out.col(found++) = v;
    }
    if (found != want) throw std::runtime_error("orthogonal_complement_basis: Gram-Schmidt collapsed");
    return out;
}

/// Spectral structure of M^{d,n} restricted to degree m.
///
/// `u` = [Q^{d,n,0} | ... | Q^{d,n,m}] with Q^{d,n,j} = E^{d,j,n} L^{d,j} and
/// L^{d,j} M^{d,j}-orthonormal; `eigenvalues` repeats lambda^{d,n}_j by
/// multiplicity, aligned with the columns of `u`; `w` = U U^T / 2.
struct SimplexSpectralFactors {
    int dim = 1;
    int m = 0;
    int n = 0;
    Vector eigenvalues;
    std::vector<int> block;  ///< degree j of each column
    Matrix u;
    Matrix w;
};

inline SimplexSpectralFactors simplex_spectral_factors(int d, int m, int n) {
    if (m < 0 || m > n) throw std::invalid_argument("simplex_spectral_factors: requires 0 <= m <= n");
    SimplexSpectralFactors f;
    f.dim = d;
    f.m = m;
    f.n = n;
    const int cols = simplex_dim(d, m);
    f.u.resize(simplex_dim(d, n), cols);
    f.eigenvalues.resize(cols);
    int c = 0;
    for (int j = 0; j <= m; ++j) {
        const Matrix q = simplex_elevation(d, j, n) * orthogonal_complement_basis(d, j);
        const double lambda = simplex_mass_eigenvalue(d, n, j);
        for (Eigen::Index k = 0; k < q.cols(); ++k, ++c) {
            f.u.col(c) = q.col(k);
            f.eigenvalues[c] = lambda;
            f.block.push_back(j);
        }
    }
    f.w = 0.5 * f.u * f.u.transpose();
    return f;
}

/// Least-squares downgrade on the simplex, U^{d,m,m} diag(lambda^{d,n}) (U^{d,m,n})^T y.
inline Vector simplex_downgrade(const SimplexSpectralFactors& low, const SimplexSpectralFactors& high, const Vector& y) {
    if (low.m != low.n || low.m != high.m || low.dim != high.dim)
        throw std::invalid_argument("simplex_downgrade: factor degrees mismatch");
    return low.u * (high.eigenvalues.asDiagonal() * (high.u.transpose() * y));
}

/// Integral over S_d: mean of the coefficients times the simplex volume 1/d!.
inline double simplex_integral(const SimplexPoly& p) { return p.coeffs.mean() / detail::factorial(p.dim); }

} // namespace bernbound

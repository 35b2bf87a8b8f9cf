#pragma once

// Exact solution of the bounds-constrained projection problems
//
//   min (q - p)^T M^m (q - p)   s.t.  E^{m,n} q >= 0   [and  integral(q) = integral(p)]
//
// on the interval (d = 1) or the d-simplex, by enumerating candidate active
// sets J of the KKT conditions. For each J the multipliers solve
//
//   sum_{j in J} (W_ij - c delta) mu_j = -(E p)_i,   i in J,   c = d!/2,
//
// the elevated solution is y = W mu + (delta nu / 2) 1 + E p with
// nu = -d! sum(mu), and the first J with mu >= 0 and y >= 0 yields
// q = U^{m,m} diag(lambda^n) (U^{m,n})^T y. The optimum is unique, so the
// first passing subset is the answer.

#include "bernstein.hpp"
#include "simplex.hpp"

#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

namespace bernbound {

class intractable_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class no_feasible_subset_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Largest number of constraints accepted by the enumerator (2^22 subsets).
inline constexpr int max_enumerated_constraints = 22;

struct KktProblem {
    int dim = 1;          ///< 1 for [0,1], d >= 2 for the simplex S_d
    int m = 0;            ///< degree of the approximant
    int n = 0;            ///< elevation degree of the constraints, n >= m
    int delta = 0;        ///< 1 enforces mass preservation
    Vector target;        ///< Bernstein coefficients of p at degree m
    std::optional<double> upper;  ///< two-sided bound; penalty oracle only

    int num_coeffs() const { return dim == 1 ? m + 1 : simplex_dim(dim, m); }
    int num_constraints() const { return dim == 1 ? n + 1 : simplex_dim(dim, n); }

    void validate() const {
        if (dim < 1) throw std::invalid_argument("KktProblem: dim must be >= 1");
        if (m < 0 || n < m) throw std::invalid_argument("KktProblem: requires 0 <= m <= n");
        if (delta != 0 && delta != 1) throw std::invalid_argument("KktProblem: delta must be 0 or 1");
        if (target.size() != num_coeffs()) throw std::invalid_argument("KktProblem: target has wrong length");
    }
};

struct KktDiagnostics {
    double stationarity = 0.0;     ///< ||2M(q-p) - E^T mu - delta nu lambda_0 1||_inf
    double min_elevated = 0.0;     ///< min(E q)
    double min_multiplier = 0.0;   ///< min(mu)
    double complementarity = 0.0;  ///< max |mu_i (E q)_i|
    double mass_defect = 0.0;      ///< |integral(q) - integral(p)| when delta = 1
    bool dual_feasible = true;
    bool primal_feasible = true;
    bool passed = true;
};

struct KktSolution {
    Vector q;
    Vector mu;
    double nu = 0.0;
    std::vector<int> active;
    Vector elevated;
    KktDiagnostics diagnostics;
    std::int64_t subsets_visited = 0;
    std::int64_t systems_solved = 0;    ///< full-rank reduced systems
    std::int64_t reconstructions = 0;   ///< times y was formed (mu >= 0)
    std::int64_t passing_subsets = 0;   ///< > 1 only with exhaustive enumeration
    double alternative_gap = 0.0;       ///< max ||q_J - q||_inf over passing J
};

struct KktOptions {
    double primal_tol = 1e-9;
    double dual_tol = 1e-12;
    double slack_tol = 1e-9;
    double rank_tol = 1e-11;
    bool early_exit = true;
};

/// Subsets of {0, ..., count-1} by increasing cardinality, lexicographic
/// within a cardinality, starting with the empty set.
class SubsetIterator {
public:
    explicit SubsetIterator(int count) : count_(count) {
        if (count < 0 || count > max_enumerated_constraints)
            throw intractable_error("subset enumeration over " + std::to_string(count) + " constraints exceeds 2^22 subsets");
    }

    const std::vector<int>& current() const { return cur_; }
    bool done() const { return done_; }

    void advance() {
        const int k = static_cast<int>(cur_.size());
        int i = k - 1;
        while (i >= 0 && cur_[static_cast<std::size_t>(i)] == count_ - k + i) --i;
        if (i >= 0) {
            ++cur_[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < k; ++j) cur_[static_cast<std::size_t>(j)] = cur_[static_cast<std::size_t>(j - 1)] + 1;
            return;
        }
        if (k == count_) {
            done_ = true;
            return;
        }
        cur_.resize(static_cast<std::size_t>(k + 1));
        for (int j = 0; j <= k; ++j) cur_[static_cast<std::size_t>(j)] = j;
    }

private:
    int count_;
    std::vector<int> cur_;
    bool done_ = false;
};

inline std::vector<std::vector<int>> subset_list(int count) {
    std::vector<std::vector<int>> out;
    for (SubsetIterator it(count); !it.done(); it.advance()) out.push_back(it.current());
    return out;
}

/// Matrices shared by every subset solve for a given (d, m, n).
struct KktOperators {
    int dim = 1;
    int m = 0;
    int n = 0;
    Matrix elevation;   ///< E^{d,m,n}
    Matrix mass;        ///< M^{d,m}
    Matrix w;           ///< W^{d,m,n}
    Matrix u_low;       ///< U^{d,m,m}
    Matrix u_high;      ///< U^{d,m,n}
    Vector lambda_high; ///< lambda^{d,n}_j repeated by multiplicity
    double lambda0 = 1.0;     ///< lambda^{d,m}_0 = integral of each basis function
    double dfact = 1.0;       ///< d!

    KktOperators(int d, int m_, int n_) : dim(d), m(m_), n(n_) {
        if (d == 1) {
            const auto low = spectral_factors(m, m);
            const auto high = spectral_factors(m, n);
            elevation = elevation_matrix(m, n);
            mass = mass_matrix(m);
            w = high.w;
            u_low = low.u;
            u_high = high.u;
            lambda_high = high.eigenvalues;
            lambda0 = mass_eigenvalue(m, 0);
        } else {
            const auto low = simplex_spectral_factors(d, m, m);
            const auto high = simplex_spectral_factors(d, m, n);
            elevation = simplex_elevation(d, m, n);
            mass = simplex_mass_matrix(d, m);
            w = high.w;
            u_low = low.u;
            u_high = high.u;
            lambda_high = high.eigenvalues;
            lambda0 = simplex_mass_eigenvalue(d, m, 0);
        }
        dfact = detail::factorial(d);
    }

    Vector downgrade(const Vector& y) const { return u_low * (lambda_high.asDiagonal() * (u_high.transpose() * y)); }
};

namespace detail {

/// In-place LU with partial pivoting; false if some pivot falls below
/// rank_tol * max|A| (the reduced system is then rank deficient).
inline bool lu_solve(Matrix& a, Vector& b, double rank_tol) {
    const Eigen::Index k = a.rows();
    if (k == 0) return true;
    const double scale = a.cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) return false;
    for (Eigen::Index c = 0; c < k; ++c) {
        Eigen::Index piv;
        const double pv = a.col(c).tail(k - c).cwiseAbs().maxCoeff(&piv);
        piv += c;
        if (pv < rank_tol * scale) return false;
        if (piv != c) {
            a.row(c).swap(a.row(piv));
            std::swap(b[c], b[piv]);
        }
        for (Eigen::Index r = c + 1; r < k; ++r) {
            const double f = a(r, c) / a(c, c);
            if (f == 0.0) continue;
            a.row(r).tail(k - c) -= f * a.row(c).tail(k - c);
            b[r] -= f * b[c];
        }
    }
    for (Eigen::Index r = k - 1; r >= 0; --r) {
        double s = b[r];
        for (Eigen::Index c = r + 1; c < k; ++c) s -= a(r, c) * b[c];
        b[r] = s / a(r, r);
    }
    return true;
}

} // namespace detail

/// Residuals of the KKT system for a candidate solution.
inline KktDiagnostics verify_kkt(const KktProblem& prob, const KktOperators& ops, const KktSolution& sol, double tol) {
    KktDiagnostics d;
    const Vector diff = sol.q - prob.target;
    Vector stat = 2.0 * ops.mass * diff - ops.elevation.transpose() * sol.mu;
    if (prob.delta) stat.array() -= sol.nu * ops.lambda0;
    d.stationarity = stat.cwiseAbs().maxCoeff();
    const Vector eq = ops.elevation * sol.q;
    d.min_elevated = eq.minCoeff();
    d.min_multiplier = sol.mu.size() ? sol.mu.minCoeff() : 0.0;
    d.complementarity = sol.mu.size() ? sol.mu.cwiseProduct(eq).cwiseAbs().maxCoeff() : 0.0;
    d.mass_defect = prob.delta ? std::abs(diff.mean()) / ops.dfact : 0.0;
    d.dual_feasible = d.min_multiplier >= -tol;
    d.primal_feasible = d.min_elevated >= -tol;
    d.passed = d.dual_feasible && d.primal_feasible && d.stationarity <= tol && d.complementarity <= tol &&
               d.mass_defect <= tol;
    return d;
}

inline KktDiagnostics verify_kkt(const KktProblem& prob, const KktSolution& sol, double tol) {
    return verify_kkt(prob, KktOperators(prob.dim, prob.m, prob.n), sol, tol);
}

inline KktSolution solve(const KktProblem& prob, const KktOperators& ops, const KktOptions& opt = {}) {
    prob.validate();
    if (prob.upper) throw std::invalid_argument("solve: upper bounds are not supported by the KKT enumerator");
    if (ops.dim != prob.dim || ops.m != prob.m || ops.n != prob.n)
        throw std::invalid_argument("solve: operators built for a different (d, m, n)");

    const int nc = prob.num_constraints();
    SubsetIterator it(nc);
    const Vector ep = ops.elevation * prob.target;
    const double shift = prob.delta ? 0.5 * ops.dfact : 0.0;

    KktSolution best;
    bool have = false;
    std::int64_t visited = 0, solved = 0, formed = 0, passing = 0;
    double gap = 0.0;
    Matrix a;
    Vector b;
    for (; !it.done(); it.advance()) {
        const auto& j = it.current();
        const auto k = static_cast<Eigen::Index>(j.size());
        ++visited;
        a.resize(k, k);
        b.resize(k);
        for (Eigen::Index r = 0; r < k; ++r) {
            b[r] = -ep[j[static_cast<std::size_t>(r)]];
            for (Eigen::Index c = 0; c < k; ++c)
                a(r, c) = ops.w(j[static_cast<std::size_t>(r)], j[static_cast<std::size_t>(c)]) - shift;
        }
        if (!detail::lu_solve(a, b, opt.rank_tol)) continue;
        ++solved;
        if (k > 0 && b.minCoeff() < -opt.dual_tol) continue;

        Vector mu = Vector::Zero(nc);
        for (Eigen::Index r = 0; r < k; ++r) mu[j[static_cast<std::size_t>(r)]] = b[r];
        const double nu = prob.delta ? -ops.dfact * mu.sum() : 0.0;
        ++formed;
        Vector y = ops.w * mu + ep;
        if (prob.delta) y.array() += 0.5 * nu;
        if (y.minCoeff() < -opt.primal_tol) continue;

        ++passing;
        Vector q = ops.downgrade(y);
        if (!have) {
            best.q = std::move(q);
            best.mu = std::move(mu);
            best.nu = nu;
            best.active = j;
            best.elevated = std::move(y);
            have = true;
            if (opt.early_exit) break;
        } else {
            gap = std::max(gap, (q - best.q).cwiseAbs().maxCoeff());
        }
    }
    if (!have) throw no_feasible_subset_error("solve: no subset satisfied the KKT conditions");
    best.subsets_visited = visited;
    best.systems_solved = solved;
    best.reconstructions = formed;
    best.passing_subsets = passing;
    best.alternative_gap = gap;
    best.diagnostics = verify_kkt(prob, ops, best, opt.slack_tol);
    return best;
}

inline KktSolution solve(const KktProblem& prob, const KktOptions& opt = {}) {
    prob.validate();
    return solve(prob, KktOperators(prob.dim, prob.m, prob.n), opt);
}

// Line-oriented key=value serialization for fixtures.

namespace detail {

inline std::string join(const Vector& v) {
    std::ostringstream os;
    os << std::setprecision(17);
    for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
    return os.str();
}

inline std::string join(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s;
}

inline std::vector<double> split_numbers(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (!tok.empty()) out.push_back(std::stod(tok));
    return out;
}

inline Vector to_vector(const std::string& s) {
    const auto v = split_numbers(s);
    return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline std::map<std::string, std::string> read_kv(std::istream& is) {
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw std::invalid_argument("read_kv: malformed line '" + line + "'");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    return kv;
}

inline const std::string& require(const std::map<std::string, std::string>& kv, const std::string& key) {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument("missing key '" + key + "'");
    return it->second;
}

} // namespace detail

inline void write_kv(std::ostream& os, const KktProblem& p) {
    os << "dim=" << p.dim << "\nm=" << p.m << "\nn=" << p.n << "\ndelta=" << p.delta << "\ntarget="
       << detail::join(p.target) << '\n';
    if (p.upper) os << "upper=" << std::setprecision(17) << *p.upper << '\n';
}

inline KktProblem read_problem(std::istream& is) {
    const auto kv = detail::read_kv(is);
    KktProblem p;
    p.dim = std::stoi(detail::require(kv, "dim"));
    p.m = std::stoi(detail::require(kv, "m"));
    p.n = std::stoi(detail::require(kv, "n"));
    p.delta = std::stoi(detail::require(kv, "delta"));
    p.target = detail::to_vector(detail::require(kv, "target"));
    if (auto it = kv.find("upper"); it != kv.end()) p.upper = std::stod(it->second);
    p.validate();
    return p;
}

/// Diagnostics in fixed column order:
/// stationarity min_elevated min_multiplier complementarity mass_defect passed.
inline std::string format_diagnostics(const KktDiagnostics& d) {
    std::ostringstream os;
    os << std::setprecision(6) << std::scientific << std::setw(14) << d.stationarity << std::setw(14)
       << d.min_elevated << std::setw(14) << d.min_multiplier << std::setw(14) << d.complementarity << std::setw(14)
       << d.mass_defect << (d.passed ? "  pass" : "  FAIL");
    return os.str();
}

inline void write_kv(std::ostream& os, const KktSolution& s) {
    os << "q=" << detail::join(s.q) << "\nmu=" << detail::join(s.mu) << "\nnu=" << std::setprecision(17) << s.nu
       << "\nactive=" << detail::join(s.active) << "\nelevated=" << detail::join(s.elevated)
       << "\nstationarity=" << s.diagnostics.stationarity << "\nmin_elevated=" << s.diagnostics.min_elevated
       << "\nmin_multiplier=" << s.diagnostics.min_multiplier << "\ncomplementarity=" << s.diagnostics.complementarity
       << "\nmass_defect=" << s.diagnostics.mass_defect << "\nsubsets_visited=" << s.subsets_visited
       << "\nsystems_solved=" << s.systems_solved << "\nreconstructions=" << s.reconstructions << '\n';
}

inline KktSolution read_solution(std::istream& is) {
    const auto kv = detail::read_kv(is);
    KktSolution s;
    s.q = detail::to_vector(detail::require(kv, "q"));
    s.mu = detail::to_vector(detail::require(kv, "mu"));
    s.nu = std::stod(detail::require(kv, "nu"));
    for (double v : detail::split_numbers(detail::require(kv, "active"))) s.active.push_back(static_cast<int>(v));
    s.elevated = detail::to_vector(detail::require(kv, "elevated"));
    s.diagnostics.stationarity = std::stod(detail::require(kv, "stationarity"));
    s.diagnostics.min_elevated = std::stod(detail::require(kv, "min_elevated"));
    s.diagnostics.min_multiplier = std::stod(detail::require(kv, "min_multiplier"));
    s.diagnostics.complementarity = std::stod(detail::require(kv, "complementarity"));
    s.diagnostics.mass_defect = std::stod(detail::require(kv, "mass_defect"));
    s.subsets_visited = std::stoll(detail::require(kv, "subsets_visited"));
    s.systems_solved = std::stoll(detail::require(kv, "systems_solved"));
    s.reconstructions = std::stoll(detail::require(kv, "reconstructions"));
    return s;
}

} // namespace bernbound

#pragma once

// Convergence-study runner: for a target function and a degree range, computes
// the L2 error of each requested approximation method and writes CSV tables.

#include "approx.hpp"
#include "cone.hpp"
#include "kkt.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace bernbound {

class spec_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class MethodKind { project, kkt, kkt_mass, cone, bernstein, p1 };

struct Method {
    MethodKind kind = MethodKind::project;
    int offset = 0;   ///< elevation n - m for the kkt variants

    std::string column() const {
        switch (kind) {
        case MethodKind::project: return "project";
        case MethodKind::kkt: return "kkt" + std::to_string(offset);
        case MethodKind::kkt_mass: return "kkt-mass" + std::to_string(offset);
        case MethodKind::cone: return "cone";
        case MethodKind::bernstein: return "bernstein";
        case MethodKind::p1: return "p1";
        }
        return {};
    }
};

/// Parses "project", "kkt@10", "kkt-mass", "cone", ... A kkt variant without
/// "@k" expands to one method per elevation offset.
inline std::vector<Method> parse_methods(const std::vector<std::string>& names, const std::vector<int>& offsets) {
    std::vector<Method> out;
    for (const auto& raw : names) {
        std::string name = raw;
        std::optional<int> off;
        if (const auto at = name.find('@'); at != std::string::npos) {
            try {
                std::size_t used = 0;
                off = std::stoi(name.substr(at + 1), &used);
                if (used != name.size() - at - 1) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw spec_error("bad elevation offset in method '" + raw + "'");
            }
            name = name.substr(0, at);
        }
        MethodKind kind;
        if (name == "project") kind = MethodKind::project;
        else if (name == "kkt") kind = MethodKind::kkt;
        else if (name == "kkt-mass") kind = MethodKind::kkt_mass;
        else if (name == "cone") kind = MethodKind::cone;
        else if (name == "bernstein") kind = MethodKind::bernstein;
        else if (name == "p1") kind = MethodKind::p1;
        else throw spec_error("unknown method '" + raw + "'");
        const bool elevated = kind == MethodKind::kkt || kind == MethodKind::kkt_mass;
        if (off && !elevated) throw spec_error("method '" + name + "' takes no elevation offset");
        if (!elevated) out.push_back({kind, 0});
        else if (off) out.push_back({kind, *off});
        else
            for (int k : offsets) out.push_back({kind, k});
    }
    return out;
}

struct ExperimentSpec {
    std::string function = "f1";   ///< corpus id or expression in x (and y)
    int dim = 1;
    int mmin = 0;
    int mmax = 8;
    std::vector<Method> methods{{MethodKind::project, 0}, {MethodKind::kkt, 0}};
    std::string out;                 ///< errors CSV path; empty means stdout
    std::optional<int> samples_degree;
    std::string samples_out;         ///< samples CSV path; empty means <out>.samples.csv
    int quad_points = 24;
    ConeOptions cone{};
};

inline constexpr int max_degree_1d = 12;
inline constexpr int max_offset_1d = 10;
inline constexpr int max_degree_2d = 4;

inline TargetFunction resolve_target(const ExperimentSpec& spec) {
    if (auto f = find_target(spec.function)) {
        if (f->dim != spec.dim)
            throw spec_error("function '" + spec.function + "' is defined for dimension " + std::to_string(f->dim));
        return *f;
    }
    try {
        return expression_target(spec.function, spec.dim);
    } catch (const expression_error& e) {
        throw spec_error(std::string("unknown function id and not a valid expression: ") + e.what());
    }
}

inline void validate(const ExperimentSpec& spec) {
    if (spec.dim != 1 && spec.dim != 2) throw spec_error("dimension must be 1 or 2");
    if (spec.mmin < 0 || spec.mmax < spec.mmin) throw spec_error("degree range must satisfy 0 <= mmin <= mmax");
    const int cap = spec.dim == 1 ? max_degree_1d : max_degree_2d;
    if (spec.mmax > cap)
        throw spec_error("degree " + std::to_string(spec.mmax) + " exceeds the cap " + std::to_string(cap) +
                         " for dimension " + std::to_string(spec.dim));
    if (spec.methods.empty()) throw spec_error("no methods requested");
    if (spec.quad_points < 2 || spec.quad_points > 64) throw spec_error("quadrature points must lie in [2, 64]");
    std::vector<std::string> seen;
    for (const auto& m : spec.methods) {
        const auto col = m.column();
        for (const auto& s : seen)
            if (s == col) throw spec_error("method '" + col + "' requested twice");
        seen.push_back(col);
        if (m.kind == MethodKind::kkt || m.kind == MethodKind::kkt_mass) {
            const int cap_off = spec.dim == 1 ? max_offset_1d : 0;
            if (m.offset < 0 || m.offset > cap_off)
                throw spec_error("elevation offset " + std::to_string(m.offset) + " outside [0, " +
                                 std::to_string(cap_off) + "] for dimension " + std::to_string(spec.dim));
        }
        if (spec.dim == 2 && (m.kind == MethodKind::cone || m.kind == MethodKind::bernstein || m.kind == MethodKind::p1))
            throw spec_error("method '" + col + "' is only available in dimension 1");
        if ((m.kind == MethodKind::bernstein || m.kind == MethodKind::p1) && spec.mmin < 1)
            throw spec_error("method '" + col + "' requires mmin >= 1");
    }
    if (spec.samples_degree && (*spec.samples_degree < spec.mmin || *spec.samples_degree > spec.mmax))
        throw spec_error("samples degree must lie in the degree range");
    resolve_target(spec);
}

/// An approximation produced by one method, evaluable at a point.
struct Approximant {
    std::optional<PolyCoeffs> poly;
    std::optional<SimplexPoly> simplex_poly;
    std::optional<PiecewiseLinear> linear;

    double operator()(double x, double y) const {
        if (poly) return evaluate(*poly, x);
        if (simplex_poly) return simplex_basis_values(2, simplex_poly->degree, {x, y}).dot(simplex_poly->coeffs);
        return (*linear)(x);
    }
};

struct ExperimentResult {
    std::vector<std::string> columns;             ///< method columns, in spec order
    std::vector<int> degrees;
    std::vector<std::vector<double>> errors;      ///< [degree][method], NaN on failure
    std::vector<std::string> failures;            ///< one note per NaN cell
    std::vector<std::optional<Approximant>> samples_approximants;   ///< at the samples degree

    bool partial() const { return !failures.empty(); }
};

namespace detail {

inline Approximant approximate(const ExperimentSpec& spec, const TargetFunction& f, const Method& method, int m,
                               const Quadrature& quad) {
    Approximant a;
    if (spec.dim == 2) {
        const SimplexPoly p = simplex_project(f, m, quad);
        if (method.kind == MethodKind::project) {
            a.simplex_poly = p;
        } else {
            KktProblem prob{2, m, m + method.offset, method.kind == MethodKind::kkt_mass ? 1 : 0, p.coeffs, {}};
            a.simplex_poly = SimplexPoly(2, m, solve(prob).q);
        }
        return a;
    }
    switch (method.kind) {
    case MethodKind::project: a.poly = project(f, m, quad); break;
    case MethodKind::kkt:
    case MethodKind::kkt_mass: {
        const PolyCoeffs p = project(f, m, quad);
        KktProblem prob{1, m, m + method.offset, method.kind == MethodKind::kkt_mass ? 1 : 0, p.coeffs, {}};
        a.poly = PolyCoeffs(solve(prob).q);
        break;
    }
    case MethodKind::cone: a.poly = solve_cone(project(f, m, quad), spec.cone).q; break;
    case MethodKind::bernstein: a.poly = bernstein_operator(f, m); break;
    case MethodKind::p1: a.linear = p1_interpolant(f, m); break;
    }
    return a;
}

inline double approximant_error(const TargetFunction& f, const Approximant& a, const Quadrature& quad) {
    if (a.poly) return l2_error(f, *a.poly, quad);
    if (a.simplex_poly) return l2_error(f, *a.simplex_poly, quad);
    return l2_error(f, *a.linear, quad);
}

inline std::string format_number(double v) {
    if (std::isnan(v)) return "NaN";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace detail

/// Runs every (degree, method) cell. Method failures become NaN cells with a
/// note; spec errors throw spec_error before any work is done.
inline ExperimentResult run(const ExperimentSpec& spec) {
    validate(spec);
    const TargetFunction f = resolve_target(spec);
    const Quadrature quad = spec.dim == 1 ? composite_gauss(spec.quad_points, 16) : collapsed_triangle(spec.quad_points, 8);

    ExperimentResult res;
    for (const auto& m : spec.methods) res.columns.push_back(m.column());
    res.samples_approximants.resize(spec.methods.size());
    for (int m = spec.mmin; m <= spec.mmax; ++m) {
        res.degrees.push_back(m);
        std::vector<double> row;
        for (std::size_t k = 0; k < spec.methods.size(); ++k) {
            double err = std::numeric_limits<double>::quiet_NaN();
            try {
                const Approximant a = detail::approximate(spec, f, spec.methods[k], m, quad);
                err = detail::approximant_error(f, a, quad);
                if (spec.samples_degree && *spec.samples_degree == m) res.samples_approximants[k] = a;
            } catch (const std::exception& e) {
                res.failures.push_back("m=" + std::to_string(m) + " " + res.columns[k] + ": " + e.what());
            }
            row.push_back(err);
        }
        res.errors.push_back(std::move(row));
    }
    return res;
}

inline void write_errors_csv(std::ostream& os, const ExperimentResult& res) {
    os << "m";
    for (const auto& c : res.columns) os << ',' << c;
    os << '\n';
    for (std::size_t i = 0; i < res.degrees.size(); ++i) {
        os << res.degrees[i];
        for (double v : res.errors[i]) os << ',' << detail::format_number(v);
        os << '\n';
    }
}

/// Grid for the samples table: 512 uniform points on [0,1], or the lattice
/// (i/31, j/31), i + j <= 31 (528 points) on the triangle.
inline std::vector<std::pair<double, double>> sample_points(int dim) {
    std::vector<std::pair<double, double>> pts;
    if (dim == 1) {
        for (int i = 0; i < 512; ++i) pts.emplace_back(i / 511.0, 0.0);
    } else {
        constexpr int n = 31;
        for (int j = 0; j <= n; ++j)
            for (int i = 0; i + j <= n; ++i) pts.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
    }
    return pts;
}

inline void write_samples_csv(std::ostream& os, const ExperimentSpec& spec, const ExperimentResult& res) {
    const TargetFunction f = resolve_target(spec);
    os << (spec.dim == 1 ? "x" : "x,y") << ",f";
    for (const auto& c : res.columns) os << ',' << c;
    os << '\n';
    for (const auto& [x, y] : sample_points(spec.dim)) {
        os << detail::format_number(x);
        if (spec.dim == 2) os << ',' << detail::format_number(y);
        os << ',' << detail::format_number(f(x, y));
        for (const auto& a : res.samples_approximants)
            os << ',' << detail::format_number(a ? (*a)(x, y) : std::numeric_limits<double>::quiet_NaN());
        os << '\n';
    }
}

/// Full pipeline with files: returns the process exit code (0 success,
/// 2 partial failure, 1 spec or I/O error). Notes go to `err`.
inline int run_to_files(const ExperimentSpec& spec, std::ostream& err = std::cerr) {
    ExperimentResult res;
    try {
        res = run(spec);
    } catch (const spec_error& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    for (const auto& note : res.failures) err << "warning: " << note << '\n';

    auto emit = [&err](const std::string& path, const std::function<void(std::ostream&)>& body) {
        if (path.empty()) {
            body(std::cout);
            return true;
        }
        std::ofstream os(path, std::ios::binary);
        if (!os) {
            err << "error: cannot open '" << path << "' for writing\n";
            return false;
        }
        body(os);
        return static_cast<bool>(os);
    };
    if (!emit(spec.out, [&res](std::ostream& os) { write_errors_csv(os, res); })) return 1;
    if (spec.samples_degree) {
        const std::string path = !spec.samples_out.empty() ? spec.samples_out
                                 : spec.out.empty()         ? std::string("samples.csv")
                                                            : spec.out + ".samples.csv";
        if (!emit(path, [&](std::ostream& os) { write_samples_csv(os, spec, res); })) return 1;
    }
    return res.partial() ? 2 : 0;
}

} // namespace bernbound

// Nonnegative degree-m approximation of a corpus function through the cone
// parametrization, followed by an independent check of the certificate.
//
//   demo_cone_certificate [function-id] [degree]

#include <bernbound/approx.hpp>
#include <bernbound/cone.hpp>

#include <cstdlib>
#include <iostream>
#include <sstream>

int main(int argc, char** argv) {
    using namespace bernbound;

    const std::string id = argc > 1 ? argv[1] : "f0";
    const int m = argc > 2 ? std::atoi(argv[2]) : 5;
    const auto f = find_target(id);
    if (!f || f->dim != 1) {
        std::cerr << "unknown univariate function '" << id << "'\n";
        return 1;
    }

    const auto quad = composite_gauss();
    const PolyCoeffs p = project(*f, m, quad);
    ConeResult res;
    try {
        res = solve_cone(p);
    } catch (const cone_nonconverged_error& e) {
        std::cerr << "warning: " << e.what() << "; reporting best iterate\n";
        res = e.best();
    }

    std::cout << "projection error  " << l2_error(*f, p, quad) << '\n'
              << "cone error        " << l2_error(*f, res.q, quad) << '\n'
              << "d_p(q)            " << res.objective << '\n'
              << "min over grid     " << min_on_grid(res.q.coeffs) << '\n'
              << "cond(T^m)         " << res.condition << '\n'
              << "restart           " << res.best_restart << " of " << ConeOptions{}.restarts << '\n';

    // re-read the certificate and confirm it generates a nonnegative polynomial
    std::stringstream ss;
    write_cone_point(ss, res.point);
    const ConePoint back = read_cone_point(ss);
    std::cout << "min eigenvalue    " << cone_min_eigenvalue(back) << '\n'
              << "certificate min   " << min_on_grid(cone_bernstein(back)) << "\n\n";
    write_cone_point(std::cout, back);
}

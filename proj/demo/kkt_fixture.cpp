// Solves the two-coefficient fixture with and without mass preservation and
// prints the solution records and KKT diagnostics.

#include <bernbound/kkt.hpp>

#include <iostream>

int main() {
    using namespace bernbound;

    KktProblem prob;
    prob.m = prob.n = 1;
    prob.target = (Vector(2) << -1.0, 1.0).finished();

    for (int delta : {0, 1}) {
        prob.delta = delta;
        const auto sol = solve(prob);
        std::cout << "# delta=" << delta << '\n';
        write_kv(std::cout, prob);
        write_kv(std::cout, sol);
        std::cout << "# stationarity  min_elevated  min_multiplier  complementarity  mass_defect\n"
                  << format_diagnostics(sol.diagnostics) << "\n\n";
    }
}

// Convergence-study runner. Writes an errors CSV (one row per degree, one
// column per method) and optionally a samples CSV for plotting.

#include <bernbound/experiment.hpp>

#include <CLI11.hpp>

#include <iostream>

int main(int argc, char** argv) {
    using namespace bernbound;

    CLI::App app{"Bounds-constrained L2 polynomial approximation study"};
    ExperimentSpec spec;
    std::vector<int> offsets;
    std::string methods = "project,kkt";
    int samples_degree = -1;

    app.add_option("--func", spec.function, "corpus id (f0 f1 f2 f2c f3 g0 g1 g2) or expression in x, y")
        ->capture_default_str();
    app.add_option("--dim", spec.dim, "domain dimension: 1 = [0,1], 2 = triangle")->capture_default_str();
    app.add_option("--mmin", spec.mmin, "lowest degree")->capture_default_str();
    app.add_option("--mmax", spec.mmax, "highest degree")->capture_default_str();
    app.add_option("--elevate", offsets, "elevation offset n - m for kkt methods (repeatable)");
    app.add_option("--methods", methods,
                   "comma list of project, kkt, kkt-mass, cone, bernstein, p1; kkt@k fixes the offset")
        ->capture_default_str();
    app.add_option("--out", spec.out, "errors CSV path (default stdout)");
    app.add_option("--samples-degree", samples_degree, "also write samples of each method at this degree");
    app.add_option("--samples-out", spec.samples_out, "samples CSV path (default <out>.samples.csv)");
    app.add_option("--quad-points", spec.quad_points, "Gauss points per subinterval")->capture_default_str();
    app.add_option("--cone-restarts", spec.cone.restarts, "random restarts for the cone optimizer")
        ->capture_default_str();
    app.add_option("--seed", spec.cone.seed, "seed for the cone optimizer")->capture_default_str();
    int cone_iterations = -1;
    app.add_option("--cone-iterations", cone_iterations,
                   "iteration cap for each cone optimizer stage (default 5000 quasi-Newton, 200 Newton)")
        ->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (offsets.empty()) offsets = {0};
        std::vector<std::string> names;
        for (const auto& part : CLI::detail::split(methods, ','))
            if (!part.empty()) names.push_back(CLI::detail::trim_copy(part));
        spec.methods = parse_methods(names, offsets);
        if (samples_degree >= 0) spec.samples_degree = samples_degree;
        if (cone_iterations > 0) {
            spec.cone.lbfgs.max_iterations = cone_iterations;
            spec.cone.newton_iterations = cone_iterations;
        }
    } catch (const spec_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return run_to_files(spec);
}

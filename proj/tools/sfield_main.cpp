#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "stablefield/experiments.hpp"
#include "stablefield/io.hpp"

namespace {

using namespace stablefield;

struct RawOpts {
    std::string space = "r1";
    double alpha = 2.0;
    double beta = 0.5;
    bool base = false;
    double alpha_prime = 2.0;
    std::string points_file;
    std::size_t samples = 100'000;
    double abs_tol = 1e-7;
    double rel_tol = 1e-6;
    std::size_t max_evals = 4'000'000;
    std::uint64_t seed = 0;
    std::string out = ".";
    int threads = 1;
    int pairs = 50;
    int instances = 20;
    std::vector<double> rhos{100.0, 1000.0, 10000.0};
    std::size_t realizations = 200;
    std::size_t cf_realizations = 10'000;
    double c_f = 1.0;
    std::string sign = "rademacher";
    double c_eps = 1.0;
    double truncation_tol = 1e-6;
};

// Flags shared by every subcommand; a config file supplies the same keys
// (flat key=value), with command-line flags taking precedence.
void add_common(CLI::App* sub, RawOpts& o) {
    sub->add_option("--space", o.space, "index family: r1, r2, r3, s2, h2, box, box1..box3");
    sub->add_option("--alpha", o.alpha, "stability index in (0,2]");
    sub->add_option("--beta", o.beta, "fractional order in (0,1)");
    sub->add_flag("--base", o.base, "use the base (non-fractional) field");
    sub->add_option("--alpha-prime", o.alpha_prime, "outer index for sub-stable sampling");
    sub->add_option("--points", o.points_file, "file with one point per line");
    sub->add_option("--samples", o.samples, "Monte Carlo sample count");
    sub->add_option("--seed", o.seed, "master seed (mandatory, no default)")->required();
    sub->add_option("--budget", o.max_evals, "quadrature evaluation budget");
    sub->add_option("--abs-tol", o.abs_tol, "quadrature absolute tolerance");
    sub->add_option("--rel-tol", o.rel_tol, "quadrature relative tolerance");
    sub->add_option("--out", o.out, "output directory for reports and CSV files");
    sub->add_option("--threads", o.threads, "worker threads (results independent of N)");
    sub->add_option("--pairs", o.pairs, "random point pairs per identity sweep");
    sub->add_option("--instances", o.instances, "randomized repetitions");
    sub->add_option("--rhos", o.rhos, "Poisson intensities for the convergence sweep")
        ->delimiter(',');
    sub->add_option("--realizations", o.realizations, "urn realizations per rho");
    sub->add_option("--cf-realizations", o.cf_realizations, "realizations for the CF check");
    sub->add_option("--c-f", o.c_f, "urn frequency constant in (0,1]");
    sub->add_option("--sign", o.sign, "sign law: rademacher or pareto");
    sub->add_option("--c-eps", o.c_eps, "Pareto tail constant");
    sub->add_option("--truncation-tol", o.truncation_tol, "urn truncation tail bound");
    sub->set_config("--config", "", "flat key=value config file mirroring the flags");
}

ExperimentConfig build_config(const std::string& command, const RawOpts& o) {
    ExperimentConfig cfg;
    cfg.command = command;
    cfg.family = SetFamily::from_name(o.space);
    if (!o.points_file.empty())
        cfg.points = parse_points_file(o.points_file, cfg.family.space);
    cfg.alpha = o.alpha;
    cfg.beta = o.base ? std::nullopt : std::optional<double>(o.beta);
    cfg.alpha_prime = o.alpha_prime;
    cfg.samples = o.samples;
    cfg.budget.abs_tol = o.abs_tol;
    cfg.budget.rel_tol = o.rel_tol;
    cfg.budget.max_evals = o.max_evals;
    cfg.seed = o.seed;
    cfg.seed_set = true;
    cfg.out_dir = o.out;
    cfg.threads = o.threads;
    cfg.pairs = o.pairs;
    cfg.instances = o.instances;
    cfg.rhos = o.rhos;
    cfg.realizations = o.realizations;
    cfg.cf_realizations = o.cf_realizations;
    cfg.c_f = o.c_f;
    if (o.sign == "rademacher")
        cfg.sign.kind = SignLawKind::Rademacher;
    else if (o.sign == "pareto")
        cfg.sign.kind = SignLawKind::SymmetricPareto;
    else
        throw std::invalid_argument("unknown sign law: " + o.sign);
    cfg.sign.c_eps = o.c_eps;
    cfg.truncation_tol = o.truncation_tol;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"stable fields indexed by separating set families: "
                 "construction, exact sampling, and statistical verification"};
    app.require_subcommand(1);
    RawOpts o;
    const std::pair<const char*, const char*> commands[] = {
        {"verify-mdk", "measure of the symmetric difference vs geodesic distance"},
        {"frac-distance", "fractional-measure distance vs distance^beta"},
        {"parity-check", "Poisson parity formula vs brute-force oracle"},
        {"sample-fdd", "exact finite-dimensional field samples + CF report"},
        {"sample-substable", "sub-stable field samples + CF report"},
        {"invariance", "increment-law invariance under the isometry group"},
        {"gaussian-cov", "alpha=2 covariance structure and its decomposition"},
        {"karlin-converge", "urn-scheme convergence sweep over rho"},
    };
    for (const auto& [name, desc] : commands) add_common(app.add_subcommand(name, desc), o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        return run_experiment(build_config(app.get_subcommands().front()->get_name(), o));
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

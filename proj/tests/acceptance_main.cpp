// Acceptance harness: exercises the library end to end, one criterion per
// line. Every criterion prints exactly one [PASS]/[FAIL] line with the
// measured quantity and its wall time; the process exits nonzero if any
// criterion fails. All randomness is seeded, so a green run is reproducible.

#include <cmath>
#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "stablefield/experiments.hpp"
#include "stablefield/io.hpp"
#include "stablefield/parity.hpp"
#include "stablefield/report.hpp"
#include "stablefield/rng.hpp"
#include "stablefield/verify.hpp"

using namespace stablefield;

namespace {

constexpr std::uint64_t kSeed = 20260823;

struct Outcome {
    bool pass = false;
    std::string detail;
};

ExperimentConfig make_config(const std::string& command, const SetFamily& family,
                             std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.command = command;
    cfg.family = family;
    cfg.seed = seed;
    cfg.seed_set = true;
    cfg.threads = 1;
    return cfg;
}

double max_rel_dev(const ExperimentReport& rep) {
    double m = 0.0;
    for (const auto& c : rep.checks) {
        const double scale = std::max(std::abs(c.target), 1e-30);
        m = std::max(m, std::abs(c.estimate - c.target) / scale);
    }
    return m;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// --- 1: symmetric-difference measure equals the geodesic distance ----------

Outcome criterion_mdk_identity() {
    Outcome out;
    double exact_dev = 0.0, curved_rel = 0.0;
    bool ok = true;
    std::uint64_t s = 1;
    for (const char* name : {"r1", "box1", "box2", "box3"}) {
        ExperimentConfig cfg = make_config("verify-mdk", SetFamily::from_name(name), kSeed + s++);
        cfg.pairs = 50;
        const auto rep = run_verify_mdk(cfg);
        ok = ok && rep.all_pass();
        exact_dev = std::max(exact_dev, rep.max_deviation());
    }
    for (const char* name : {"r2", "s2", "h2"}) {
        ExperimentConfig cfg = make_config("verify-mdk", SetFamily::from_name(name), kSeed + s++);
        cfg.pairs = 50;
        const auto rep = run_verify_mdk(cfg);
        ok = ok && rep.all_pass();
        curved_rel = std::max(curved_rel, max_rel_dev(rep));
    }
    out.pass = ok && exact_dev < 1e-12 && curved_rel < 1e-3;
    out.detail = "exact max err " + fmt(exact_dev) + ", curved max rel " + fmt(curved_rel) +
                 " (50 pairs/family)";
    return out;
}

// --- 2: fractional distance equals distance^beta ---------------------------

Outcome criterion_fractional_distance() {
    Outcome out;
    double line_rel = 0.0, curved_rel = 0.0;
    bool ok = true;
    std::uint64_t s = 10;
    for (const char* name : {"r1", "r2", "r3", "s2", "h2"}) {
        ExperimentConfig cfg =
            make_config("frac-distance", SetFamily::from_name(name), kSeed + s++);
        cfg.pairs = 50;
        const auto rep = run_frac_distance(cfg);
        ok = ok && rep.all_pass();
        const double rel = max_rel_dev(rep);
        if (std::string(name) == "r1")
            line_rel = rel;
        else
            curved_rel = std::max(curved_rel, rel);
    }
    out.pass = ok && line_rel < 1e-8 && curved_rel < 2e-3;
    out.detail = "line max rel " + fmt(line_rel) + ", curved max rel " + fmt(curved_rel) +
                 " (beta in {0.25,0.5,0.75})";
    return out;
}

// --- 3: parity probabilities against the brute-force Poisson oracle --------

Outcome criterion_parity_oracle() {
    Outcome out;
    ExperimentConfig cfg =
        make_config("parity-check", SetFamily::separating(SpaceKind::Euclidean1), kSeed + 20);
    cfg.instances = 20;
    cfg.samples = 100'000;
    const auto rep = run_parity_check(cfg);
    double worst = 0.0;  // deviation in SE units
    for (const auto& c : rep.checks)
        if (c.se > 0.0) worst = std::max(worst, std::abs(c.estimate - c.target) / c.se);
    out.pass = rep.all_pass();
    out.detail = "20 instances x 1e5 samples, worst dev " + fmt(worst) + " SE";
    return out;
}

// --- 4: closed-form masses against the quadrature definition ---------------

Outcome criterion_dual_mode() {
    Outcome out;
    Rng rng(derive_seed(kSeed, 30));
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const int d = 1 + i % 3;
        std::vector<double> masses(std::size_t{1} << d, 0.0);
        for (std::size_t m = 1; m < masses.size(); ++m) masses[m] = rng.exponential();
        const auto cells = CellMeasureTable::from_masses(d, std::move(masses));
        const double beta = rng.uniform(0.1, 0.9);
        const unsigned pattern =
            1 + static_cast<unsigned>(rng.next_u64() % ((1u << d) - 1));
        const double closed = mubeta_mass(cells, beta, pattern, MubetaMode::ClosedForm);
        const double quad = mubeta_mass(cells, beta, pattern, MubetaMode::Quadrature);
        worst = std::max(worst, std::abs(closed - quad) / std::max(closed, 1e-30));
    }
    out.pass = worst < 1e-8;
    out.detail = "50 instances, worst rel dev " + fmt(worst);
    return out;
}

// --- 5: standardized increments are unit stable ----------------------------

Outcome criterion_increment_law() {
    Outcome out;
    bool ok = true;
    double worst = 0.0;
    std::uint64_t s = 40;
    for (double alpha : {0.8, 1.0, 1.5, 2.0}) {
        ExperimentConfig cfg =
            make_config("sample-fdd", SetFamily::separating(SpaceKind::Euclidean1), kSeed + s++);
        cfg.alpha = alpha;
        cfg.beta = 0.5;
        cfg.samples = 100'000;
        const auto rep = run_sample_fdd(cfg);
        ok = ok && rep.all_pass();
        bool saw_increment = false;
        for (const auto& c : rep.checks)
            if (c.name.rfind("increment_cf_", 0) == 0) {
                saw_increment = true;
                if (c.se > 0.0) worst = std::max(worst, std::abs(c.estimate - c.target) / c.se);
            }
        ok = ok && saw_increment;
    }
    out.pass = ok;
    out.detail = "alpha in {0.8,1,1.5,2}, theta in {0.5,1,2}, worst dev " + fmt(worst) + " SE";
    return out;
}

// --- 6: increments are invariant under the isometry group ------------------

Outcome criterion_invariance() {
    Outcome out;
    bool ok = true;
    double flat = 0.0, curved = 0.0;
    std::uint64_t s = 50;
    for (const char* name : {"r1", "r2", "r3", "s2", "h2"}) {
        ExperimentConfig cfg = make_config("invariance", SetFamily::from_name(name), kSeed + s++);
        cfg.instances = 20;
        const auto rep = run_invariance(cfg);
        ok = ok && rep.all_pass();
        if (std::string(name) == "r1")
            flat = std::max(flat, rep.max_deviation());
        else
            curved = std::max(curved, rep.max_deviation());
    }
    out.pass = ok && flat < 1e-10 && curved < 2e-3;
    out.detail = "20 elements/space, d=3; line max dev " + fmt(flat) + ", quadrature max dev " +
                 fmt(curved);
    return out;
}

// --- 7: quadratic-exponent field has the set-indexed covariance ------------

Outcome criterion_gaussian_structure() {
    Outcome out;
    ExperimentConfig cfg =
        make_config("gaussian-cov", SetFamily::separating(SpaceKind::Euclidean1), kSeed + 60);
    cfg.alpha = 2.0;
    cfg.samples = 100'000;
    const auto rep = run_gaussian_cov(cfg);
    double sum_dev = 0.0, cross_dev = 0.0;
    for (const auto& c : rep.checks) {
        if (c.name == "w1_plus_w2_equals_cov_y") sum_dev = std::abs(c.estimate - c.target);
        if (c.name == "two_m11_equals_cov_y") cross_dev = std::abs(c.estimate - c.target);
    }
    out.pass = rep.all_pass();
    out.detail = "decomposition dev " + fmt(sum_dev) + ", 2m vs cov dev " + fmt(cross_dev) +
                 ", moments within 4 SE";
    return out;
}

// --- 8: sub-stable mixture matches its characteristic function -------------

Outcome criterion_substable() {
    Outcome out;
    ExperimentConfig cfg =
        make_config("sample-substable", SetFamily::separating(SpaceKind::Euclidean1), kSeed + 70);
    cfg.alpha = 1.0;
    cfg.alpha_prime = 2.0;
    cfg.samples = 100'000;
    const auto rep = run_sample_substable(cfg);
    double worst = 0.0;
    for (const auto& c : rep.checks)
        if (c.se > 0.0) worst = std::max(worst, std::abs(c.estimate - c.target) / c.se);
    out.pass = rep.all_pass();
    out.detail = "alpha 1 inside alpha' 2, d=2, worst dev " + fmt(worst) + " SE";
    return out;
}

// --- 9: urn sign sums converge to the stable limit -------------------------

Outcome criterion_urn_limit() {
    Outcome out;
    bool ok = true;
    std::string parts;
    std::uint64_t s = 80;
    struct Setup {
        const char* label;
        double alpha;
        SignLaw sign;
    };
    const Setup setups[] = {{"rademacher a=2", 2.0, {SignLawKind::Rademacher, 1.0}},
                            {"pareto a=1.5", 1.5, {SignLawKind::SymmetricPareto, 1.0}}};
    for (const auto& setup : setups) {
        ExperimentConfig cfg = make_config("karlin-converge",
                                           SetFamily::separating(SpaceKind::Euclidean1), kSeed + s++);
        cfg.alpha = setup.alpha;
        cfg.beta = 0.5;
        cfg.sign = setup.sign;
        cfg.rhos = {100.0, 1000.0, 10000.0};
        cfg.realizations = 200;
        cfg.cf_realizations = 10'000;
        const auto rep = run_karlin_converge(cfg);
        ok = ok && rep.all_pass();
        double final_rel = 0.0, cf_dev = 0.0;
        for (const auto& c : rep.checks) {
            if (c.name == "relerr_rho_10000") final_rel = c.estimate;
            if (c.name.rfind("limit_cf_", 0) == 0)
                cf_dev = std::max(cf_dev, std::abs(c.estimate - c.target));
        }
        if (!parts.empty()) parts += "; ";
        parts += std::string(setup.label) + ": relerr@1e4 " + fmt(final_rel) + ", cf dev " +
                 fmt(cf_dev);
    }
    out.pass = ok;
    out.detail = parts;
    return out;
}

// --- 10: the fractional kernel is of conditional negative type -------------

Outcome criterion_negative_type() {
    Outcome out;
    bool ok = true;
    double worst_margin = -1e300;  // max of form - allowance; must stay <= 0
    std::uint64_t s = 90;
    for (SpaceKind k : {SpaceKind::Euclidean1, SpaceKind::Euclidean2, SpaceKind::Euclidean3,
                        SpaceKind::Sphere2, SpaceKind::HyperbolicDisc}) {
        const SetFamily fam = SetFamily::separating(k);
        Rng rng(derive_seed(kSeed, s++));
        for (int trial = 0; trial < 100; ++trial) {
            const int npts = 4;
            std::vector<SpacePoint> pts;
            for (int i = 0; i < npts; ++i) pts.push_back(random_point(k, rng));
            std::vector<double> lam(npts);
            double mean = 0.0;
            for (double& l : lam) {
                l = rng.uniform(-1.0, 1.0);
                mean += l;
            }
            for (double& l : lam) l -= mean / npts;
            const double beta = rng.uniform(0.15, 0.85);
            const auto r = negative_type_form(pts, lam, fam, beta);
            worst_margin = std::max(worst_margin, r.form - r.allowance);
            ok = ok && r.form <= r.allowance;
        }
    }
    out.pass = ok;
    out.detail = "100 weightings/space, worst form minus allowance " + fmt(worst_margin);
    return out;
}

struct Entry {
    int id;
    const char* label;
    Outcome (*fn)();
    double budget_s;
};

}  // namespace

int main() {
    const Entry entries[] = {
        {1, "measure-distance identity", criterion_mdk_identity, 60.0},
        {2, "fractional distance identity", criterion_fractional_distance, 60.0},
        {3, "parity formula vs Poisson oracle", criterion_parity_oracle, 30.0},
        {4, "closed-form vs quadrature masses", criterion_dual_mode, 10.0},
        {5, "standardized increment law", criterion_increment_law, 60.0},
        {6, "group-invariant increments", criterion_invariance, 180.0},
        {7, "gaussian covariance structure", criterion_gaussian_structure, 60.0},
        {8, "sub-stable characteristic function", criterion_substable, 30.0},
        {9, "urn-scheme stable limit", criterion_urn_limit, 300.0},
        {10, "conditional negative type", criterion_negative_type, 60.0},
    };
    int failures = 0;
    for (const auto& e : entries) {
        Stopwatch watch;
        Outcome out;
        try {
            out = e.fn();
        } catch (const std::exception& ex) {
            out.pass = false;
            out.detail = std::string("exception: ") + ex.what();
        }
        const double secs = watch.seconds();
        const bool in_budget = secs <= e.budget_s;
        const bool pass = out.pass && in_budget;
        if (!pass) ++failures;
        std::printf("[%s] %2d. %s: %s (%.1f s, budget %.0f s)\n", pass ? "PASS" : "FAIL", e.id,
                    e.label, out.detail.c_str(), secs, e.budget_s);
        std::fflush(stdout);
    }
    if (failures == 0)
        std::printf("all 10 acceptance criteria passed\n");
    else
        std::printf("%d acceptance criteria FAILED\n", failures);
    return failures == 0 ? 0 : 1;
}

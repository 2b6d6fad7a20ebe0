#include "stablefield/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include "stablefield/io.hpp"
#include "stablefield/parity.hpp"
#include "stablefield/sampling.hpp"
#include "stablefield/verify.hpp"

namespace stablefield {

namespace {

constexpr double kThetaGrid[3] = {0.5, 1.0, 2.0};

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

std::vector<SpacePoint> default_pair(const SetFamily& family) {
    if (family.tag == SetFamily::Tag::Box) {
        switch (family.box_dim()) {
            case 1: return {SpacePoint::r1(1.0), SpacePoint::r1(0.6)};
            case 2: return {SpacePoint::r2(1.0, 1.0), SpacePoint::r2(0.7, 1.4)};
            default: return {SpacePoint::r3(1.0, 1.0, 1.0), SpacePoint::r3(0.7, 1.4, 0.5)};
        }
    }
    switch (family.space) {
        case SpaceKind::Euclidean1: return {SpacePoint::r1(1.0), SpacePoint::r1(-0.5)};
        case SpaceKind::Euclidean2: return {SpacePoint::r2(1.0, 0.0), SpacePoint::r2(0.3, 0.8)};
        case SpaceKind::Euclidean3:
            return {SpacePoint::r3(1.0, 0.0, 0.0), SpacePoint::r3(0.2, 0.5, -0.4)};
        case SpaceKind::Sphere2:
            return {SpacePoint::sphere({std::cos(1.0), std::sin(1.0), 0.0}),
                    SpacePoint::sphere({std::cos(2.2), 0.0, std::sin(2.2)})};
        case SpaceKind::HyperbolicDisc:
            return {SpacePoint::disc({0.4, 0.0}), SpacePoint::disc({0.1, 0.5})};
    }
    throw std::logic_error("unknown family");
}

SpacePoint random_box_corner(int n, Rng& rng) {
    SpacePoint p;
    p.kind = n == 1 ? SpaceKind::Euclidean1 : (n == 2 ? SpaceKind::Euclidean2 : SpaceKind::Euclidean3);
    for (int i = 0; i < n; ++i) p.coords[static_cast<std::size_t>(i)] = rng.uniform(0.1, 2.0);
    return p;
}

// Random pair with separation >= 0.05 so relative tolerances stay meaningful.
std::pair<SpacePoint, SpacePoint> random_pair(SpaceKind kind, Rng& rng) {
    for (int attempt = 0; attempt < 100; ++attempt) {
        SpacePoint x = random_point(kind, rng);
        SpacePoint y = random_point(kind, rng);
        if (distance(x, y) >= 0.05) return {x, y};
    }
    throw std::runtime_error("could not draw a separated random pair");
}

double box_volume(const SpacePoint& t, int n) {
    double v = 1.0;
    for (int i = 0; i < n; ++i) v *= t.coords[static_cast<std::size_t>(i)];
    return v;
}

double box_symmdiff_exact(const SpacePoint& t, const SpacePoint& s, int n) {
    SpacePoint m = t;
    for (int i = 0; i < n; ++i)
        m.coords[static_cast<std::size_t>(i)] =
            std::min(t.coords[static_cast<std::size_t>(i)], s.coords[static_cast<std::size_t>(i)]);
    return box_volume(t, n) + box_volume(s, n) - 2.0 * box_volume(m, n);
}

nlohmann::json points_json(const std::vector<SpacePoint>& pts) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& p : pts) arr.push_back(point_to_json(p));
    return arr;
}

}  // namespace

void ExperimentConfig::validate() const {
    require(seed_set, "seed is mandatory and has no default");
    require(alpha > 0.0 && alpha <= 2.0, "alpha must lie in (0,2]");
    if (beta) require(*beta > 0.0 && *beta < 1.0, "beta must lie in (0,1)");
    require(alpha_prime > 0.0 && alpha_prime <= 2.0, "alpha_prime must lie in (0,2]");
    require(samples >= 1, "samples must be >= 1");
    require(threads >= 1, "threads must be >= 1");
    require(pairs >= 1, "pairs must be >= 1");
    require(instances >= 1, "instances must be >= 1");
    require(!rhos.empty(), "need at least one rho");
    for (double r : rhos) require(std::isfinite(r) && r > 0.0, "rho values must be > 0");
    require(realizations >= 1, "realizations must be >= 1");
    require(cf_realizations >= 1000, "cf_realizations must be >= 1000");
    require(c_f > 0.0 && c_f <= 1.0, "c_f must lie in (0,1]");
    require(truncation_tol > 0.0, "truncation tolerance must be > 0");
    require(budget.abs_tol > 0.0 && budget.rel_tol >= 0.0 && budget.max_evals > 0,
            "invalid quadrature budget");
}

nlohmann::json ExperimentConfig::to_json() const {
    nlohmann::json j{{"command", command},
                     {"family", family.name()},
                     {"alpha", alpha},
                     {"alpha_prime", alpha_prime},
                     {"samples", samples},
                     {"seed", seed},
                     {"out_dir", out_dir},
                     {"threads", threads},
                     {"pairs", pairs},
                     {"instances", instances},
                     {"rhos", rhos},
                     {"realizations", realizations},
                     {"cf_realizations", cf_realizations},
                     {"c_f", c_f},
                     {"sign_law", sign.kind == SignLawKind::Rademacher ? "rademacher" : "pareto"},
                     {"c_eps", sign.c_eps},
                     {"truncation_tol", truncation_tol},
                     {"budget", {{"abs_tol", budget.abs_tol},
                                 {"rel_tol", budget.rel_tol},
                                 {"max_evals", budget.max_evals}}}};
    if (beta)
        j["beta"] = *beta;
    else
        j["field"] = "base";
    if (!points.empty()) j["points"] = points_json(points);
    return j;
}

ExperimentReport run_verify_mdk(const ExperimentConfig& cfg) {
    cfg.validate();
    Stopwatch watch;
    ExperimentReport rep;
    rep.experiment = "verify-mdk";
    rep.seed = cfg.seed;
    rep.config = cfg.to_json();
    Rng rng(derive_seed(cfg.seed, 101));
    if (cfg.family.tag == SetFamily::Tag::Box) {
        const int n = cfg.family.box_dim();
        for (int i = 0; i < cfg.pairs; ++i) {
            const SpacePoint t = random_box_corner(n, rng);
            const SpacePoint s = random_box_corner(n, rng);
            const double target = box_symmdiff_exact(t, s, n);
            const double est = symmdiff_measure(t, s, cfg.family, cfg.budget);
            rep.checks.push_back(CheckResult::make("pair_" + std::to_string(i), target, est, 0.0,
                                                   1e-12 * std::max(1.0, target),
                                                   Provenance::Analytic));
        }
    } else {
        const SpaceKind kind = cfg.family.space;
        const bool exact = kind == SpaceKind::Euclidean1;
        for (int i = 0; i < cfg.pairs; ++i) {
            const auto [x, y] = random_pair(kind, rng);
            const double target = distance(x, y);
            const double est = symmdiff_measure(x, y, cfg.family, cfg.budget);
            const double tol = exact ? 1e-12 * std::max(1.0, target) : 1e-3 * target;
            rep.checks.push_back(CheckResult::make("pair_" + std::to_string(i), target, est, 0.0,
                                                   tol, Provenance::Analytic));
        }
    }
    rep.wall_time_s = watch.seconds();
    return rep;
}

ExperimentReport run_frac_distance(const ExperimentConfig& cfg) {
    cfg.validate();
    Stopwatch watch;
    ExperimentReport rep;
    rep.experiment = "frac-distance";
    rep.seed = cfg.seed;
    rep.config = cfg.to_json();
    const double betas[3] = {0.25, 0.5, 0.75};
    Rng rng(derive_seed(cfg.seed, 102));
    for (double beta : betas) {
        for (int i = 0; i < cfg.pairs; ++i) {
            std::string name = "beta_" + format_g9(beta) + "_pair_" + std::to_string(i);
            if (cfg.family.tag == SetFamily::Tag::Box) {
                const int n = cfg.family.box_dim();
                const SpacePoint t = random_box_corner(n, rng);
                const SpacePoint s = random_box_corner(n, rng);
                const double target = std::pow(box_symmdiff_exact(t, s, n), beta);
                const double est = fractional_distance(t, s, cfg.family, beta, cfg.budget);
                rep.checks.push_back(CheckResult::make(std::move(name), target, est, 0.0,
                                                       1e-12 * std::max(1.0, target),
                                                       Provenance::Analytic));
            } else {
                const SpaceKind kind = cfg.family.space;
                const auto [x, y] = random_pair(kind, rng);
                const double target = std::pow(distance(x, y), beta);
                const double est = fractional_distance(x, y, cfg.family, beta, cfg.budget);
                const double rel = kind == SpaceKind::Euclidean1 ? 1e-8 : 2e-3;
                rep.checks.push_back(CheckResult::make(std::move(name), target, est, 0.0,
                                                       rel * target, Provenance::Analytic));
            }
        }
    }
    rep.wall_time_s = watch.seconds();
    return rep;
}

ExperimentReport run_parity_check(const ExperimentConfig& cfg) {
    cfg.validate();
    Stopwatch watch;
    ExperimentReport rep;
    rep.experiment = "parity-check";
    rep.seed = cfg.seed;
    rep.config = cfg.to_json();
    Rng rng(derive_seed(cfg.seed, 103));
    for (int inst = 0; inst < cfg.instances; ++inst) {
        const int d = 1 + inst % 3;
        const unsigned ncells = 1u << d;
        CellMeasureTable cells;
        double r = 1.0;
        unsigned pattern = 1;
        double target = 0.0;
        // redraw until the parity probability is testable by Monte Carlo
        for (int attempt = 0;; ++attempt) {
            if (attempt > 200) throw std::runtime_error("could not draw a testable parity instance");
            std::vector<double> masses(ncells, 0.0);
            for (unsigned int m = 1; m < ncells; ++m) masses[m] = rng.exponential();
            cells = CellMeasureTable::from_masses(d, std::move(masses));
            r = std::exp(rng.uniform(std::log(0.3), std::log(3.0)));
            pattern = 1 + static_cast<unsigned>(rng.next_u64() % (ncells - 1));
            target = poisson_parity_prob(cells, r, pattern);
            if (target >= 1e-3 && target <= 1.0 - 1e-3) break;
        }
        const auto oracle = poisson_parity_brute(cells, r, pattern, cfg.samples, rng);
        const double se =
            std::sqrt(std::max(oracle.se * oracle.se,
                               target * (1.0 - target) / static_cast<double>(oracle.n)));
        rep.checks.push_back(CheckResult::make(
            "instance_" + std::to_string(inst) + "_d" + std::to_string(d), target, oracle.value,
            se, 4.0 * se, Provenance::MonteCarlo));
    }
    rep.wall_time_s = watch.seconds();
    return rep;
}

namespace {

void add_cf_checks(ExperimentReport& rep, const SampleBatch& batch,
                   const std::function<double(std::span<const double>)>& target_cf,
                   const std::string& prefix) {
    const int d = batch.d;
    for (double t : kThetaGrid) {
        std::vector<double> theta(static_cast<std::size_t>(d), 0.0);
        theta[0] = t;
        auto e1 = empirical_cf(batch, theta);
        rep.checks.push_back(CheckResult::make(prefix + "cf_e1_" + format_g9(t), target_cf(theta),
                                               e1.estimate.real(), e1.se, 4.0 * e1.se,
                                               Provenance::MonteCarlo));
        if (d > 1) {
            std::fill(theta.begin(), theta.end(), t);
            auto ones = empirical_cf(batch, theta);
            rep.checks.push_back(CheckResult::make(prefix + "cf_ones_" + format_g9(t),
                                                   target_cf(theta), ones.estimate.real(), ones.se,
                                                   4.0 * ones.se, Provenance::MonteCarlo));
        }
    }
}

}  // namespace

ExperimentReport run_sample_fdd(const ExperimentConfig& cfg, std::string* csv_out) {
    cfg.validate();
    Stopwatch watch;
    ExperimentReport rep;
    rep.experiment = "sample-fdd";
    rep.seed = cfg.seed;
    const std::vector<SpacePoint> points = cfg.points.empty() ? default_pair(cfg.family) : cfg.points;
    rep.config = cfg.to_json();
    rep.config["points"] = points_json(points);

    const CellMeasureTable cells = cell_measures(points, cfg.family, cfg.budget);
    const StableScaleTable scales = cfg.beta
                                        ? fdd_scales(cells, FractionalParams{cfg.alpha, *cfg.beta})
                                        : base_scales(cells, cfg.alpha);
    SampleBatch batch = sample_fdd(scales, cfg.samples, derive_seed(cfg.seed, 104), cfg.threads);
    batch.beta = cfg.beta;
    batch.seed = cfg.seed;

    add_cf_checks(rep, batch,
                  [&](std::span<const double> th) { return fdd_cf(th, scales); }, "");

    // Standardized increment (v1 - v2) / d^{beta/alpha}: unit SaS by the
    // metric identity, since m^{(1,0)} + m^{(0,1)} is the fractional mass of
    // the symmetric difference.
    if (batch.d >= 2 && cfg.beta) {
        const double dbeta = std::pow(scales.sigma[1], cfg.alpha) +
                             std::pow(scales.sigma[2], cfg.alpha);
        if (dbeta > 0.0) {
            const double w = std::pow(dbeta, 1.0 / cfg.alpha);
            SampleBatch inc;
            inc.d = 1;
            inc.n = batch.n;
            inc.alpha = cfg.alpha;
            inc.seed = batch.seed;
            inc.values.resize(batch.n);
            for (std::size_t i = 0; i < batch.n; ++i)
                inc.values[i] = (batch.value(i, 0) - batch.value(i, 1)) / w;
            for (double t : kThetaGrid) {
                const double theta[1] = {t};
                auto est = empirical_cf(inc, theta);
                rep.checks.push_back(CheckResult::make(
                    "increment_cf_" + format_g9(t), std::exp(-std::pow(std::abs(t), cfg.alpha)),
                    est.estimate.real(), est.se, 4.0 * est.se, Provenance::MonteCarlo));
            }
        }
    }
    if (csv_out) {
        std::ostringstream os;
        write_sample_csv(os, batch, points, cells.method);
        *csv_out = os.str();
    }
    rep.wall_time_s = watch.seconds();
    return rep;
}

ExperimentReport run_sample_substable(const ExperimentConfig& cfg, std::string* csv_out) {
    cfg.validate();
    require(cfg.alpha < cfg.alpha_prime, "sub-stable sampling needs alpha < alpha_prime");
    Stopwatch watch;
    ExperimentReport rep;
    rep.experiment = "sample-substable";
    rep.seed = cfg.seed;
    const std::vector<SpacePoint> points = cfg.points.empty() ? default_pair(cfg.family) : cfg.points;
    rep.config = cfg.to_json();
    rep.config["points"] = points_json(points);

    const CellMeasureTable cells = cell_measures(points, cfg.family, cfg.budget);
    SampleBatch batch = sample_substable(cells, cfg.alpha, cfg.alpha_prime, cfg.samples,
                                         derive_seed(cfg.seed, 105), cfg.threads);
    batch.seed = cfg.seed;
    add_cf_checks(rep, batch,
                  [&](std::span<const double> th) {
                      return substable_cf(th, cells, cfg.alpha, cfg.alpha_prime);
                  },
                  "");
    if (csv_out) {
        std::ostringstream os;
        write_sample_csv(os, batch, points, cells.method);
        *csv_out = os.str();
    }
    rep.wall_time_s = watch.seconds();
    return rep;
}

ExperimentReport run_invariance(const ExperimentConfig& cfg) {
    cfg.validate();
    Stopwatch watch;
    ExperimentReport rep;
    rep.experiment = "invariance";
    rep.seed = cfg.seed;
    rep.config = cfg.to_json();
    const double beta = cfg.beta.value_or(0.5);
    const bool box = cfg.family.tag == SetFamily::Tag::Box;
    const int count = box ? 1 : cfg.instances;
    for (int inst = 0; inst < count; ++inst) {
        Rng rng(derive_seed(cfg.seed, 106 + static_cast<std::uint64_t>(inst)));
        std::vector<SpacePoint> pts;
        GroupElement g;
        if (box) {
            pts = cfg.points.empty() ? default_pair(cfg.family) : cfg.points;
            g = GroupElement::identity(pts.front().kind);
        } else {
            const SpaceKind kind = cfg.family.space;
            if (cfg.points.empty())
                for (int j = 0; j < 3; ++j) pts.push_back(random_point(kind, rng));
            else
                pts = cfg.points;
            g = random_group_element(kind, rng);
        }
        const ExperimentReport sub = invariance_report(pts, g, cfg.family, beta, cfg.budget);
        const auto& last = sub.checks.back();  // max_deviation summary
        rep.checks.push_back(CheckResult::make("g" + std::to_string(inst) + "_max_deviation",
                                               last.target, last.estimate, 0.0, last.tolerance,
                                               last.provenance));
    }
    rep.wall_time_s = watch.seconds();
    return rep;
}

ExperimentReport run_gaussian_cov(const ExperimentConfig& cfg) {
    cfg.validate();
    Stopwatch watch;
    ExperimentReport rep;
    rep.experiment = "gaussian-cov";
    rep.seed = cfg.seed;
    const std::vector<SpacePoint> points = cfg.points.empty() ? default_pair(cfg.family) : cfg.points;
    require(points.size() == 2, "gaussian-cov works on a pair of points");
    const double beta = cfg.beta.value_or(0.5);
    rep.config = cfg.to_json();
    rep.config["points"] = points_json(points);
    rep.config["covariance_convention"] =
        "alpha=2 CF exp(-sigma^2 theta^2), so variances are 2 mu^beta (no 1/2 factors)";

    const CellMeasureTable cells = cell_measures(points, cfg.family, cfg.budget);
    const double only_a = cells.mass_of(0b01);
    const double only_b = cells.mass_of(0b10);
    const double both = cells.mass_of(0b11);
    const GaussianCov cov =
        gaussian_cov_from_measures(only_a + both, only_b + both, only_a + only_b, beta);

    rep.checks.push_back(CheckResult::make("w1_plus_w2_equals_cov_y", cov.cov_y,
                                           cov.cov_w1 + cov.cov_w2, 0.0,
                                           1e-12 * std::max(1.0, std::abs(cov.cov_y)),
                                           Provenance::Analytic));
    rep.checks.push_back(CheckResult::make("two_m11_equals_cov_y", cov.cov_y,
                                           2.0 * mubeta_mass(cells, beta, 0b11), 0.0, 1e-8,
                                           Provenance::Analytic));

    const StableScaleTable scales = fdd_scales(cells, FractionalParams{2.0, beta});
    const SampleBatch batch =
        sample_fdd(scales, cfg.samples, derive_seed(cfg.seed, 107), cfg.threads);
    const auto cross = empirical_cross_moment(batch, 0, 1);
    rep.checks.push_back(CheckResult::make("empirical_cov", cov.cov_y, cross.value, cross.se,
                                           4.0 * cross.se, Provenance::MonteCarlo));
    const auto var_a = empirical_variance(batch, 0);
    rep.checks.push_back(CheckResult::make("empirical_var_a", 2.0 * std::pow(cov.mu_a, beta),
                                           var_a.value, var_a.se, 4.0 * var_a.se,
                                           Provenance::MonteCarlo));

    const GaussianPairMatrices pm = gaussian_pair_matrices(cov);
    const SampleBatch pairs =
        sample_gaussian_pair(pm, cfg.samples, derive_seed(cfg.seed, 108), cfg.threads);
    double sum = 0.0, sumsq = 0.0, xsum = 0.0, xsumsq = 0.0;
    for (std::size_t i = 0; i < pairs.n; ++i) {
        const double pa = pairs.value(i, 0) + pairs.value(i, 2);
        const double pb = pairs.value(i, 1) + pairs.value(i, 3);
        const double p = pa * pb;
        sum += p;
        sumsq += p * p;
        const double x = pairs.value(i, 0) * pairs.value(i, 3);
        xsum += x;
        xsumsq += x * x;
    }
    const double n = static_cast<double>(pairs.n);
    const double mean = sum / n;
    const double se = std::sqrt(std::max(0.0, sumsq / n - mean * mean) / n);
    rep.checks.push_back(
        CheckResult::make("pair_sum_cov", cov.cov_y, mean, se, 4.0 * se, Provenance::MonteCarlo));
    const double xmean = xsum / n;
    const double xse = std::sqrt(std::max(0.0, xsumsq / n - xmean * xmean) / n);
    rep.checks.push_back(CheckResult::make("independence_cross_cov", 0.0, xmean, xse, 4.0 * xse,
                                           Provenance::MonteCarlo));
    rep.wall_time_s = watch.seconds();
    return rep;
}

ExperimentReport run_karlin_converge(const ExperimentConfig& cfg, std::string* csv_out) {
    cfg.validate();
    Stopwatch watch;
    ExperimentReport rep;
    rep.experiment = "karlin-converge";
    rep.seed = cfg.seed;
    rep.config = cfg.to_json();

    CellMeasureTable cells;
    if (cfg.points.empty()) {
        cells = CellMeasureTable::from_masses(1, {0.0, 1.0});
    } else {
        cells = cell_measures(cfg.points, cfg.family, cfg.budget);
        rep.config["points"] = points_json(cfg.points);
    }
    const int d = cells.d;
    const unsigned ncells = 1u << d;

    KarlinConfig kc;
    kc.beta = cfg.beta.value_or(0.5);
    kc.alpha = cfg.alpha;
    kc.c_f = cfg.c_f;
    kc.sign = cfg.sign;
    kc.truncation_tol = cfg.truncation_tol;

    // Diagnostic pattern: the parity class with the largest limit mass.
    const auto masses = mubeta_masses(cells, kc.beta);
    unsigned pattern = 1;
    for (unsigned pat = 2; pat < ncells; ++pat)
        if (masses[pat] > masses[pattern]) pattern = pat;
    kc.rho = cfg.rhos.front();
    const MLimitInfo limit = m_statistic_limit(cells, kc, pattern);
    require(limit.normalized_limit > 0.0, "diagnostic parity class has zero limit mass");
    rep.config["pattern"] = mask_to_bits(pattern, d);
    rep.config["normalized_limit"] = round_g9(limit.normalized_limit);
    rep.config["mean_rate"] = round_g9(limit.mean_rate);

    std::vector<double> rhos = cfg.rhos;
    std::sort(rhos.begin(), rhos.end());

    std::ostringstream csv;
    write_urn_csv_header(csv, d);
    std::vector<double> mean_relerr(rhos.size(), 0.0);
    nlohmann::json truncation = nlohmann::json::array();
    for (std::size_t ri = 0; ri < rhos.size(); ++ri) {
        KarlinConfig kr = kc;
        kr.rho = rhos[ri];
        const double balpha = std::pow(b_rho(kr), kr.alpha);
        std::vector<UrnRealization> urns(cfg.realizations);
        run_blocks(cfg.realizations, cfg.threads, [&](std::size_t rep_i) {
            Rng rng(derive_seed(cfg.seed, (ri + 1) * 1'000'000 + rep_i));
            urns[rep_i] = simulate_U(kr, cells, rng);
        });
        double acc = 0.0;
        for (std::size_t rep_i = 0; rep_i < cfg.realizations; ++rep_i) {
            const auto& u = urns[rep_i];
            acc += std::abs(static_cast<double>(u.odd_counts[pattern]) / balpha -
                            limit.normalized_limit) /
                   limit.normalized_limit;
            write_urn_csv_row(csv, kr.rho, rep_i, u);
        }
        mean_relerr[ri] = acc / static_cast<double>(cfg.realizations);
        truncation.push_back({{"rho", kr.rho},
                              {"k_max", urns.front().k_max},
                              {"truncated_mean", round_g9(urns.front().truncated_mean)}});
        const bool final_rho = ri + 1 == rhos.size();
        rep.checks.push_back(CheckResult::make("relerr_rho_" + format_g9(kr.rho), 0.0,
                                               mean_relerr[ri], 0.0, final_rho ? 0.10 : 1.0,
                                               Provenance::DerivedOracle));
    }
    rep.config["truncation"] = truncation;
    if (rhos.size() >= 2) {
        double max_increase = 0.0;
        for (std::size_t ri = 0; ri + 1 < rhos.size(); ++ri)
            max_increase = std::max(max_increase, mean_relerr[ri + 1] - mean_relerr[ri]);
        rep.checks.push_back(CheckResult::make("relerr_monotone_decrease", 0.0,
                                               std::max(0.0, max_increase), 0.0, 0.0,
                                               Provenance::DerivedOracle));
    }

    // CF of U/b at the largest rho against the limit law.
    {
        KarlinConfig kr = kc;
        kr.rho = rhos.back();
        const double b = b_rho(kr);
        SampleBatch cf_batch;
        cf_batch.d = d;
        cf_batch.n = cfg.cf_realizations;
        cf_batch.alpha = kr.alpha;
        cf_batch.seed = cfg.seed;
        cf_batch.values.assign(cf_batch.n * static_cast<std::size_t>(d), 0.0);
        std::vector<UrnRealization> urns(cfg.cf_realizations);
        run_blocks(cfg.cf_realizations, cfg.threads, [&](std::size_t rep_i) {
            Rng rng(derive_seed(cfg.seed, 900'000'000 + rep_i));
            urns[rep_i] = simulate_U(kr, cells, rng);
        });
        for (std::size_t rep_i = 0; rep_i < cfg.cf_realizations; ++rep_i) {
            for (int j = 0; j < d; ++j)
                cf_batch.values[rep_i * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] =
                    urns[rep_i].U[static_cast<std::size_t>(j)] / b;
            write_urn_csv_row(csv, kr.rho, cfg.realizations + rep_i, urns[rep_i]);
        }
        for (double t : kThetaGrid) {
            std::vector<double> theta(static_cast<std::size_t>(d), 0.0);
            theta[0] = t;
            const auto est = empirical_cf(cf_batch, theta);
            const double target = limit_cf(theta, cells, kr.alpha, kr.beta, kr.sign).real();
            rep.checks.push_back(CheckResult::make("limit_cf_" + format_g9(t), target,
                                                   est.estimate.real(), est.se,
                                                   4.0 * est.se + 0.02, Provenance::MonteCarlo));
        }
    }
    if (csv_out) *csv_out = csv.str();
    rep.wall_time_s = watch.seconds();
    return rep;
}

int run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    std::filesystem::create_directories(cfg.out_dir);
    ExperimentReport rep;
    std::string csv;
    std::string csv_name;
    try {
        if (cfg.command == "verify-mdk") {
            rep = run_verify_mdk(cfg);
        } else if (cfg.command == "frac-distance") {
            rep = run_frac_distance(cfg);
        } else if (cfg.command == "parity-check") {
            rep = run_parity_check(cfg);
        } else if (cfg.command == "sample-fdd") {
            rep = run_sample_fdd(cfg, &csv);
            csv_name = "samples.csv";
        } else if (cfg.command == "sample-substable") {
            rep = run_sample_substable(cfg, &csv);
            csv_name = "samples.csv";
        } else if (cfg.command == "invariance") {
            rep = run_invariance(cfg);
        } else if (cfg.command == "gaussian-cov") {
            rep = run_gaussian_cov(cfg);
        } else if (cfg.command == "karlin-converge") {
            rep = run_karlin_converge(cfg, &csv);
            csv_name = "urns.csv";
        } else {
            throw std::invalid_argument("unknown command: " + cfg.command);
        }
    } catch (const std::runtime_error& e) {
        rep.experiment = cfg.command;
        rep.seed = cfg.seed;
        rep.config = cfg.to_json();
        rep.config["error"] = e.what();
        rep.partial = true;
    }
    const std::filesystem::path out(cfg.out_dir);
    write_text_file((out / (cfg.command + "-report.json")).string(), rep.to_json().dump(2) + "\n");
    write_text_file((out / (cfg.command + "-report.csv")).string(), rep.to_csv());
    if (!csv.empty() && !csv_name.empty()) write_text_file((out / csv_name).string(), csv);
    std::size_t passed = 0;
    for (const auto& c : rep.checks)
        if (c.pass) ++passed;
    std::cout << cfg.command << ": " << passed << "/" << rep.checks.size() << " checks passed"
              << (rep.partial ? " [partial]" : "") << " ("
              << format_g9(rep.wall_time_s) << " s)\n";
    return rep.all_pass() ? 0 : 1;
}

}  // namespace stablefield

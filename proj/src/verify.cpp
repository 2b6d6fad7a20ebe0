#include "stablefield/verify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "stablefield/io.hpp"
#include "stablefield/parity.hpp"
#include "stablefield/rng.hpp"

namespace stablefield {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

void CfEstimate::validate() const {
    if (std::abs(estimate) > 1.0 + 4.0 * se + 1e-12)
        throw std::logic_error("CF estimate modulus exceeds 1 + 4 SE");
}

CfEstimate empirical_cf(const SampleBatch& samples, std::span<const double> theta) {
    require(samples.n >= 1000, "empirical CF needs n >= 1000");
    require(theta.size() == static_cast<std::size_t>(samples.d), "theta dimension mismatch");
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < samples.n; ++i) {
        double t = 0.0;
        for (int j = 0; j < samples.d; ++j)
            t += theta[static_cast<std::size_t>(j)] * samples.value(i, j);
        re += std::cos(t);
        im += std::sin(t);
    }
    CfEstimate e;
    e.theta.assign(theta.begin(), theta.end());
    e.n = samples.n;
    const double n = static_cast<double>(samples.n);
    e.estimate = {re / n, im / n};
    // Var of one term e^{iT} is 1 - |E e^{iT}|^2 for the complex mean.
    const double mod2 = std::norm(e.estimate);
    e.se = std::sqrt(std::max(0.0, 1.0 - mod2) / n);
    e.validate();
    return e;
}

MomentEstimate empirical_cross_moment(const SampleBatch& samples, int j, int k) {
    require(samples.n >= 2, "moment estimate needs n >= 2");
    require(j >= 0 && j < samples.d && k >= 0 && k < samples.d, "column out of range");
    double sum = 0.0, sumsq = 0.0;
    for (std::size_t i = 0; i < samples.n; ++i) {
        const double p = samples.value(i, j) * samples.value(i, k);
        sum += p;
        sumsq += p * p;
    }
    MomentEstimate e;
    e.n = samples.n;
    const double n = static_cast<double>(samples.n);
    e.value = sum / n;
    const double var = std::max(0.0, sumsq / n - e.value * e.value);
    e.se = std::sqrt(var / n);
    return e;
}

MomentEstimate empirical_variance(const SampleBatch& samples, int j) {
    return empirical_cross_moment(samples, j, j);
}

GaussianCov gaussian_cov_from_measures(double mu_a, double mu_b, double mu_delta, double beta) {
    require(std::isfinite(mu_a) && mu_a >= 0.0, "mu_a must be >= 0");
    require(std::isfinite(mu_b) && mu_b >= 0.0, "mu_b must be >= 0");
    require(std::isfinite(mu_delta) && mu_delta >= 0.0, "mu_delta must be >= 0");
    require(beta > 0.0 && beta < 1.0, "beta must lie in (0,1)");
    GaussianCov c;
    c.mu_a = mu_a;
    c.mu_b = mu_b;
    c.mu_delta = mu_delta;
    c.beta = beta;
    const double pa = std::pow(mu_a, beta);
    const double pb = std::pow(mu_b, beta);
    const double pd = std::pow(mu_delta, beta);
    const double ps = std::pow(mu_a + mu_b, beta);
    c.cov_y = pa + pb - pd;
    c.cov_w1 = ps - pd;
    c.cov_w2 = pa + pb - ps;
    return c;
}

GaussianCov gaussian_cov_analytic(const SpacePoint& x, const SpacePoint& y,
                                  const SetFamily& family, double beta,
                                  const PrecisionBudget& budget) {
    const CellMeasureTable t = cell_measures({x, y}, family, budget);
    const double only_a = t.mass_of(0b01);  // point 1: A \ B
    const double only_b = t.mass_of(0b10);
    const double both = t.mass_of(0b11);
    return gaussian_cov_from_measures(only_a + both, only_b + both, only_a + only_b, beta);
}

GaussianPairMatrices gaussian_pair_matrices(const GaussianCov& cov) {
    const double va1 = std::pow(2.0 * cov.mu_a, cov.beta);
    const double vb1 = std::pow(2.0 * cov.mu_b, cov.beta);
    GaussianPairMatrices m;
    m.first = {va1, cov.cov_w1, vb1};
    m.second = {2.0 * std::pow(cov.mu_a, cov.beta) - va1, cov.cov_w2,
                2.0 * std::pow(cov.mu_b, cov.beta) - vb1};
    return m;
}

namespace {

// Lower Cholesky factor of [[aa, ab], [ab, bb]]; tiny negative pivots from
// rounding are clamped to zero.
std::array<double, 3> chol2(const std::array<double, 3>& m) {
    const double l11 = std::sqrt(std::max(0.0, m[0]));
    const double l21 = l11 > 0.0 ? m[1] / l11 : 0.0;
    const double l22 = std::sqrt(std::max(0.0, m[2] - l21 * l21));
    return {l11, l21, l22};
}

}  // namespace

SampleBatch sample_gaussian_pair(const GaussianPairMatrices& m, std::size_t n, std::uint64_t seed,
                                 int threads) {
    require(n > 0, "need at least one sample");
    const auto l1 = chol2(m.first);
    const auto l2 = chol2(m.second);
    SampleBatch batch;
    batch.d = 4;
    batch.n = n;
    batch.alpha = 2.0;
    batch.seed = seed;
    batch.values.assign(n * 4, 0.0);
    const std::size_t block = sample_block_length();
    const std::size_t nblocks = (n + block - 1) / block;
    run_blocks(nblocks, threads, [&](std::size_t b) {
        Rng rng(derive_seed(seed, b));
        const std::size_t lo = b * block;
        const std::size_t hi = std::min(n, lo + block);
        for (std::size_t i = lo; i < hi; ++i) {
            const double z1 = rng.normal(), z2 = rng.normal();
            const double z3 = rng.normal(), z4 = rng.normal();
            double* row = &batch.values[i * 4];
            row[0] = l1[0] * z1;
            row[1] = l1[1] * z1 + l1[2] * z2;
            row[2] = l2[0] * z3;
            row[3] = l2[1] * z3 + l2[2] * z4;
        }
    });
    return batch;
}

ExperimentReport invariance_report(const std::vector<SpacePoint>& points, const GroupElement& g,
                                   const SetFamily& family, double beta,
                                   const PrecisionBudget& budget, double tolerance) {
    require(!points.empty() && points.size() <= 4, "invariance check supports 1..4 points");
    Stopwatch watch;
    const CellMeasureTable base = cell_measures(points, family, budget);
    const CellMeasureTable inc = increment_cell_measures(points, g, family, budget);
    const auto m_base = mubeta_masses(base, beta);
    const auto m_inc = mubeta_masses(inc, beta);
    const bool exact = base.method == CellMethod::Exact && inc.method == CellMethod::Exact;
    const double tol = tolerance > 0.0 ? tolerance : (exact ? 1e-10 : 2e-3);
    const Provenance prov = exact ? Provenance::Analytic : Provenance::DerivedOracle;

    ExperimentReport rep;
    rep.experiment = "invariance";
    nlohmann::json pts = nlohmann::json::array();
    for (const auto& p : points) pts.push_back(point_to_json(p));
    rep.config = {{"family", family.name()},
                  {"beta", beta},
                  {"points", pts},
                  {"group", group_to_json(g)},
                  {"tolerance", tol}};
    double maxdev = 0.0;
    for (unsigned pat = 1; pat < m_base.size(); ++pat) {
        rep.checks.push_back(CheckResult::make("m_" + mask_to_bits(pat, base.d), m_base[pat],
                                               m_inc[pat], 0.0, tol, prov));
        maxdev = std::max(maxdev, std::abs(m_inc[pat] - m_base[pat]));
    }
    rep.checks.push_back(CheckResult::make("max_deviation", 0.0, maxdev, 0.0, tol, prov));
    rep.wall_time_s = watch.seconds();
    return rep;
}

NegativeTypeResult negative_type_form(const std::vector<SpacePoint>& points,
                                      std::span<const double> lambda, const SetFamily& family,
                                      double beta, const PrecisionBudget& budget) {
    require(points.size() == lambda.size(), "one weight per point");
    require(points.size() >= 2, "need at least two points");
    require(beta > 0.0 && beta < 1.0, "beta must lie in (0,1)");
    NegativeTypeResult out;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            const CellMeasureTable t = pair_symmdiff_table(points[i], points[j], family, budget);
            const double dij = mubeta_mass(t, beta, 1u);
            const double e = t.err;
            double derr = 0.0;
            if (e > 0.0)
                derr = t.mass[1] >= e ? std::min(beta * std::pow(t.mass[1], beta - 1.0) * e,
                                                 std::pow(e, beta))
                                      : std::pow(e, beta);
            const double w = lambda[i] * lambda[j];
            out.form += 2.0 * w * dij;
            out.allowance += 2.0 * std::abs(w) * (derr + 1e-12);
        }
    return out;
}

}  // namespace stablefield

#include "stablefield/parity.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "stablefield/quadrature.hpp"

namespace stablefield {

namespace {

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

void check_beta(double beta) {
    require(beta > 0.0 && beta < 1.0, "beta must lie in (0,1)");
}

void check_pattern(const CellMeasureTable& cells, unsigned pattern) {
    require(pattern < (1u << cells.d), "parity pattern out of range");
}

// (-1)^{popcount(s & pattern)}
inline double sign_of(unsigned s, unsigned pattern) {
    return (std::popcount(s & pattern) & 1) ? -1.0 : 1.0;
}

}  // namespace

double c_beta(double beta) {
    check_beta(beta);
    return beta * std::pow(2.0, 1.0 - beta) / std::tgamma(1.0 - beta);
}

void FractionalParams::validate() const {
    require(std::isfinite(alpha) && alpha > 0.0 && alpha <= 2.0, "alpha must lie in (0,2]");
    check_beta(beta);
}

std::vector<double> parity_exponents(const CellMeasureTable& cells) {
    cells.validate();
    const unsigned n = 1u << cells.d;
    std::vector<double> a(n, 0.0);
    for (unsigned s = 0; s < n; ++s) {
        double acc = 0.0;
        for (unsigned eta = 1; eta < n; ++eta)
            if (std::popcount(s & eta) & 1) acc += cells.mass[eta];
        a[s] = 2.0 * acc;
    }
    return a;
}

namespace {

double parity_prob_from_exponents(const std::vector<double>& a, int d, double r,
                                  unsigned pattern) {
    const unsigned n = 1u << d;
    const double scale = std::ldexp(1.0, -d);  // 2^{-d}
    if (pattern == 0) {
        double s = 0.0;
        for (unsigned ms = 0; ms < n; ++ms) s += std::exp(-r * a[ms]);
        return std::min(1.0, scale * s);
    }
    // sum of signs vanishes, so replace e^{-ra} by expm1(-ra): exact at the
    // level of the alternating sum and stable as r -> 0.
    Kahan acc;
    for (unsigned ms = 0; ms < n; ++ms) acc.add(sign_of(ms, pattern) * std::expm1(-r * a[ms]));
    const double p = scale * acc.value();
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace

double poisson_parity_prob(const CellMeasureTable& cells, double r, unsigned pattern) {
    cells.validate();
    check_pattern(cells, pattern);
    require(std::isfinite(r) && r > 0.0, "intensity r must be > 0");
    return parity_prob_from_exponents(parity_exponents(cells), cells.d, r, pattern);
}

std::vector<double> poisson_parity_all(const CellMeasureTable& cells, double r) {
    cells.validate();
    require(std::isfinite(r) && r > 0.0, "intensity r must be > 0");
    const auto a = parity_exponents(cells);
    const unsigned n = 1u << cells.d;
    std::vector<double> out(n, 0.0);
    for (unsigned pat = 0; pat < n; ++pat)
        out[pat] = parity_prob_from_exponents(a, cells.d, r, pat);
    return out;
}

MonteCarloEstimate poisson_parity_brute(const CellMeasureTable& cells, double r, unsigned pattern,
                                        std::size_t n, Rng& rng) {
    cells.validate();
    check_pattern(cells, pattern);
    require(std::isfinite(r) && r > 0.0, "intensity r must be > 0");
    require(n > 0, "need at least one sample");
    const unsigned ncells = 1u << cells.d;
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) {
        unsigned par = 0;
        for (unsigned eta = 1; eta < ncells; ++eta) {
            if (cells.mass[eta] == 0.0) continue;
            if (rng.poisson(r * cells.mass[eta]) & 1) par ^= eta;
        }
        if (par == pattern) ++hits;
    }
    MonteCarloEstimate e;
    e.n = n;
    e.value = static_cast<double>(hits) / static_cast<double>(n);
    e.se = std::sqrt(e.value * (1.0 - e.value) / static_cast<double>(n));
    return e;
}

namespace {

double mubeta_closed_from_exponents(const std::vector<double>& a, int d, double beta,
                                    unsigned pattern) {
    Kahan acc;
    const unsigned n = 1u << d;
    for (unsigned ms = 0; ms < n; ++ms)
        acc.add(sign_of(ms, pattern) * std::pow(a[ms], beta));
    const double v = -std::pow(2.0, 1.0 - beta - d) * acc.value();
    return std::max(v, 0.0);
}

}  // namespace

double mubeta_mass(const CellMeasureTable& cells, double beta, unsigned pattern, MubetaMode mode) {
    cells.validate();
    check_beta(beta);
    check_pattern(cells, pattern);
    require(pattern != 0, "fractional mass needs a nonzero parity pattern");
    const auto a = parity_exponents(cells);
    if (mode == MubetaMode::ClosedForm)
        return mubeta_closed_from_exponents(a, cells.d, beta, pattern);

    // Quadrature route: integral of c_beta P_r(pattern) r^{-beta-1} dr over
    // (0, inf), split at r = 1 with substitutions mapping both pieces onto
    // (0, 1) with bounded integrands:
    //   r = u^{1/(1-beta)}  =>  integrand  c_beta/(1-beta) * P(r)/r,
    //   r = w^{-1/beta}     =>  integrand  c_beta/beta * P(r).
    const double cb = c_beta(beta);
    const int d = cells.d;
    const double scale = std::ldexp(1.0, -d);
    // Exact limits of the transformed integrands at the mapped endpoints; used
    // when the substitution under/overflows in double precision.
    double slope0 = 0.0;  // lim_{r->0} P(r)/r
    double pinf = 0.0;    // lim_{r->inf} P(r)
    for (unsigned ms = 0; ms < (1u << d); ++ms) {
        slope0 -= sign_of(ms, pattern) * scale * a[ms];
        if (a[ms] == 0.0) pinf += sign_of(ms, pattern) * scale;
    }
    auto head = [&, slope0](double u) {
        const double r = std::pow(u, 1.0 / (1.0 - beta));
        if (r == 0.0) return cb / (1.0 - beta) * slope0;
        const double p = parity_prob_from_exponents(a, d, r, pattern);
        return cb / (1.0 - beta) * (p / r);
    };
    auto tail = [&, pinf](double w) {
        const double r = std::pow(w, -1.0 / beta);
        if (!std::isfinite(r)) return cb / beta * pinf;
        return cb / beta * parity_prob_from_exponents(a, d, r, pattern);
    };
    const auto qh = integrate_adaptive(head, 0.0, 1.0, 5e-11, 1e-12, 400000);
    const auto qt = integrate_adaptive(tail, 0.0, 1.0, 5e-11, 1e-12, 400000);
    if (!qh.converged || !qt.converged)
        throw std::runtime_error("fractional mass quadrature did not converge");
    return std::max(qh.value + qt.value, 0.0);
}

std::vector<double> mubeta_masses(const CellMeasureTable& cells, double beta) {
    cells.validate();
    check_beta(beta);
    const auto a = parity_exponents(cells);
    const unsigned n = 1u << cells.d;
    std::vector<double> out(n, 0.0);
    for (unsigned pat = 1; pat < n; ++pat)
        out[pat] = mubeta_closed_from_exponents(a, cells.d, beta, pat);
    return out;
}

double fractional_distance(const SpacePoint& x, const SpacePoint& y, const SetFamily& family,
                           double beta, const PrecisionBudget& budget) {
    check_beta(beta);
    const CellMeasureTable t = pair_symmdiff_table(x, y, family, budget);
    return mubeta_mass(t, beta, 1u);
}

}  // namespace stablefield

#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "stablefield/mdk.hpp"
#include "stablefield/rng.hpp"

namespace stablefield {

// Law of the urn signs eps_k. Rademacher pairs with alpha = 2; the symmetric
// Pareto law P(|eps| > x) = c_eps x^{-alpha} (x >= c_eps^{1/alpha}) pairs
// with alpha in (0,2).
enum class SignLawKind { Rademacher, SymmetricPareto };

struct SignLaw {
    SignLawKind kind = SignLawKind::Rademacher;
    double c_eps = 1.0;
};

// Occupancy scheme: urn k receives Poisson(rho * p_k * mu(.)) points with
// p_k = c_f * k^{-1/beta}; the slowly varying factor is the constant
// L = c_f^beta.
struct KarlinConfig {
    double beta = 0.5;
    double alpha = 2.0;
    double c_f = 1.0;   // must lie in (0,1] so the p_k are probabilities
    double rho = 100.0;
    SignLaw sign;
    double truncation_tol = 1e-6;   // bound on expected points beyond k_max
    std::uint64_t k_max = 0;        // 0: derive the smallest k_max meeting the bound

    void validate() const;
    double p_k(std::uint64_t k) const;
    double slowly_varying_L() const { return std::pow(c_f, beta); }
};

// sigma_eps^alpha of the sign law: Rademacher (alpha = 2): E eps^2 / 2 = 1/2;
// symmetric Pareto: c_eps * integral_0^inf x^{-alpha} sin(x) dx, evaluated by
// quadrature with an integration-by-parts tail (the analytic value
// c_eps Gamma(1-alpha) cos(pi alpha / 2) serves as a test oracle).
double sigma_eps_alpha(const SignLaw& sign, double alpha);

// Normalization b_rho = ((beta / c_beta) rho^beta L sigma_eps^alpha)^{1/alpha}.
double b_rho(const KarlinConfig& cfg);

double sample_sign(const SignLaw& sign, double alpha, Rng& rng);

// sum_{k > K} k^{-s} for s > 1 (Euler-Maclaurin beyond a short head).
double power_tail_sum(double s, std::uint64_t K);

// Smallest K with sum_{k > K} rho p_k * mass below cfg.truncation_tol.
// Throws std::runtime_error naming the required K when it cannot be
// represented (no feasible simulation).
std::uint64_t required_k_max(const KarlinConfig& cfg, double mass);

// Expected number of urns k <= k_max with an odd point count in a set of
// the given measure (analytic; series-accelerated tail).
double expected_odd_count(const KarlinConfig& cfg, double mass);

struct UrnRealization {
    std::vector<double> U;                  // d accumulated sign sums
    std::vector<std::uint64_t> odd_counts;  // per parity pattern, size 1<<d
    // Sparse odd/even indicator matrix: (urn index, parity pattern over the
    // d sets) for every retained urn with at least one odd count.
    std::vector<std::pair<std::uint64_t, unsigned>> odd_urns;
    std::uint64_t k_max = 0;
    std::uint64_t head_urns = 0;     // urns simulated one-by-one
    std::uint64_t tail_urns = 0;     // occupied urns reached by skip-sampling
    double truncated_mean = 0.0;     // expected points in urns beyond k_max
};

// One exact realization of (U(A_1..A_d), odd-pattern counts). Urns with
// intensity >= ~1e-3 are simulated per-cell by parity Bernoullis; the sparse
// remainder up to k_max is skip-sampled: an Exp(1) clock against the exact
// cumulative intensity sum_{j<=k} lambda_j locates the next occupied urn,
// whose point count is then drawn conditioned on being >= 1. Total expected
// mass beyond k_max is below cfg.truncation_tol (reported as truncated_mean);
// an explicit cfg.k_max failing that bound is an error naming the required K.
UrnRealization simulate_U(const KarlinConfig& cfg, const CellMeasureTable& cells, Rng& rng);

// Convenience form: builds the cell-measure table for the points first.
UrnRealization simulate_U(const KarlinConfig& cfg, std::span<const SpacePoint> points,
                          const SetFamily& family, Rng& rng,
                          const PrecisionBudget& budget = {});

struct MLimitInfo {
    double normalized_limit = 0.0;  // m^delta / sigma_eps^alpha: limit of M / b_rho^alpha
    double mean_rate = 0.0;         // (beta / c_beta) m^delta: limit of E M / (rho^beta L)
};
MLimitInfo m_statistic_limit(const CellMeasureTable& cells, const KarlinConfig& cfg,
                             unsigned pattern);

// CF of the limiting stable vector: exp(-sum_delta |<theta,delta>|^alpha m^delta).
// Real-valued by symmetry; the sign law enters only through the b_rho
// normalization, which cancels, so it does not affect the value.
std::complex<double> limit_cf(std::span<const double> theta, const CellMeasureTable& cells,
                              double alpha, double beta, const SignLaw& sign = {});

}  // namespace stablefield

#pragma once

#include <complex>
#include <span>
#include <vector>

#include "stablefield/mdk.hpp"
#include "stablefield/report.hpp"
#include "stablefield/sampling.hpp"

namespace stablefield {

struct CfEstimate {
    std::vector<double> theta;
    std::complex<double> estimate{0.0, 0.0};
    double se = 0.0;  // from the per-sample complex variance
    std::size_t n = 0;

    void validate() const;  // |estimate| <= 1 + 4 se
};

// (1/n) sum exp(i <theta, row>). Requires n >= 1000 so the SE is meaningful.
CfEstimate empirical_cf(const SampleBatch& samples, std::span<const double> theta);

struct MomentEstimate {
    double value = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

// E X_j X_k estimated over rows (centered fields: this is the covariance).
MomentEstimate empirical_cross_moment(const SampleBatch& samples, int j, int k);
// E X_j^2.
MomentEstimate empirical_variance(const SampleBatch& samples, int j);

// Covariance structure of the alpha = 2 fractional field over a pair of
// index sets with measures (mu_a, mu_b) and symmetric difference mu_delta:
//   cov_y  = mu_a^b + mu_b^b - mu_delta^b
//   cov_w1 = (mu_a + mu_b)^b - mu_delta^b
//   cov_w2 = mu_a^b + mu_b^b - (mu_a + mu_b)^b
// so cov_w1 + cov_w2 = cov_y identically (the shared term cancels).
struct GaussianCov {
    double cov_y = 0.0;
    double cov_w1 = 0.0;
    double cov_w2 = 0.0;
    double mu_a = 0.0, mu_b = 0.0, mu_delta = 0.0;
    double beta = 0.5;
};

GaussianCov gaussian_cov_from_measures(double mu_a, double mu_b, double mu_delta, double beta);
GaussianCov gaussian_cov_analytic(const SpacePoint& x, const SpacePoint& y,
                                  const SetFamily& family, double beta,
                                  const PrecisionBudget& budget = {});

// 2x2 covariance matrices of the two independent summands evaluated at the
// pair (A, B), stored as (aa, ab, bb):
//   first:  [  (2 mu_a)^b,                 cov_w1;  ..., (2 mu_b)^b ]
//   second: [ 2 mu_a^b - (2 mu_a)^b,       cov_w2;  ..., 2 mu_b^b - (2 mu_b)^b ]
// Both are positive semidefinite; their sum reproduces the field covariance.
struct GaussianPairMatrices {
    std::array<double, 3> first{};
    std::array<double, 3> second{};
};
GaussianPairMatrices gaussian_pair_matrices(const GaussianCov& cov);

// Draws n rows (W1(A), W1(B), W2(A), W2(B)) with the two pairs independent
// (d = 4 batch). Deterministic in (seed, n) and thread count.
SampleBatch sample_gaussian_pair(const GaussianPairMatrices& m, std::size_t n, std::uint64_t seed,
                                 int threads = 1);

// Compares the fractional cell masses of the configuration against those of
// its image increments under g, per parity pattern. Deviation target is 0;
// tolerance 0 selects 1e-10 for exact-method tables and 2e-3 otherwise.
ExperimentReport invariance_report(const std::vector<SpacePoint>& points, const GroupElement& g,
                                   const SetFamily& family, double beta,
                                   const PrecisionBudget& budget = {}, double tolerance = 0.0);

// Quadratic form sum_i sum_j lam_i lam_j d^beta(x_i, x_j); nonpositive for
// any weights with sum 0, up to the reported allowance. The allowance bounds
// the propagated measure-quadrature error: a pair mass m known to +-e has
// |d^beta error| <= beta m^{beta-1} e (concavity) capped by e^beta.
struct NegativeTypeResult {
    double form = 0.0;
    double allowance = 0.0;
};
NegativeTypeResult negative_type_form(const std::vector<SpacePoint>& points,
                                      std::span<const double> lambda, const SetFamily& family,
                                      double beta, const PrecisionBudget& budget = {});

}  // namespace stablefield

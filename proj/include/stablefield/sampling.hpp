#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "stablefield/mdk.hpp"
#include "stablefield/parity.hpp"
#include "stablefield/rng.hpp"

namespace stablefield {

// Symmetric alpha-stable draw with E exp(itX) = exp(-(sigma |t|)^alpha),
// alpha in (0,2]. Chambers-Mallows-Stuck; alpha = 2 reduces to
// sigma * sqrt(2) * N(0,1), alpha = 1 to a Cauchy quantile.
double sas_sample(double alpha, double sigma, Rng& rng);

// Positive gamma-stable draw with E exp(-t xi) = exp(-t^gamma), gamma in
// (0,1). Kanter's representation.
double positive_stable_sample(double gamma, Rng& rng);

// Per-pattern scale parameters sigma_delta of the independent stable
// components behind a finite-dimensional distribution.
struct StableScaleTable {
    int d = 0;
    double alpha = 2.0;
    std::vector<double> sigma;  // size 1 << d, sigma[0] = 0

    void validate() const;
};

// Fractional field of order beta: sigma_delta = (m^delta)^{1/alpha}.
StableScaleTable fdd_scales(const CellMeasureTable& cells, const FractionalParams& params);
inline StableScaleTable fdd_scales(const CellMeasureTable& cells, double alpha, double beta) {
    return fdd_scales(cells, FractionalParams{alpha, beta});
}

// Uncorrected base field: sigma_eta = mass(eta)^{1/alpha}.
StableScaleTable base_scales(const CellMeasureTable& cells, double alpha);

// A batch of n iid d-dimensional draws, row-major. `components` optionally
// logs the underlying per-pattern stable draws (n x 2^d) so that linear
// reconstructions can be tested exactly.
struct SampleBatch {
    int d = 0;
    std::size_t n = 0;
    std::vector<double> values;
    double alpha = 2.0;
    std::optional<double> beta;
    std::optional<double> alpha_prime;
    std::uint64_t seed = 0;
    std::vector<double> components;

    double value(std::size_t i, int j) const { return values[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)]; }
    double component(std::size_t i, unsigned pattern) const {
        return components[i * (std::size_t{1} << d) + pattern];
    }
};

// Exact sampler for the law with CF exp(-sum_delta |<theta,delta>|^alpha
// sigma_delta^alpha): independent stable draws per pattern, summed into
// coordinates. Deterministic in (seed, n): work is split into fixed blocks
// of 4096 rows with per-block derived seeds, so the thread count never
// changes the output.
SampleBatch sample_fdd(const StableScaleTable& scales, std::size_t n, std::uint64_t seed,
                       int threads = 1, bool log_components = false);

// Convenience wrapper: index points -> cell measures -> scales -> batch.
// With beta set, patterns carry the fractional masses m^delta; without, the
// plain cell masses (base field).
SampleBatch sample_field(const std::vector<SpacePoint>& points, const SetFamily& family,
                         double alpha, std::optional<double> beta, std::size_t n,
                         std::uint64_t seed, const PrecisionBudget& budget = {}, int threads = 1);

// Sub-stable construction: an S_{alpha'} vector with the cell scales,
// multiplied by an independent positive (alpha/alpha')-stable factor to the
// power 1/alpha'. Requires 0 < alpha < alpha' <= 2.
SampleBatch sample_substable(const CellMeasureTable& cells, double alpha, double alpha_prime,
                             std::size_t n, std::uint64_t seed, int threads = 1);

// Runs fn(block_index) over all blocks on up to `threads` workers. Blocks own
// disjoint row ranges and derive their own seeds, so any schedule produces
// identical output; the fixed block length is sample_block_length().
void run_blocks(std::size_t nblocks, int threads, const std::function<void(std::size_t)>& fn);
std::size_t sample_block_length();

// Exact characteristic functions (both real by symmetry).
double fdd_cf(std::span<const double> theta, const StableScaleTable& scales);
double substable_cf(std::span<const double> theta, const CellMeasureTable& cells, double alpha,
                    double alpha_prime);

}  // namespace stablefield

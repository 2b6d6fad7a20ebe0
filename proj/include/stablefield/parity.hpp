#pragma once

#include <cstddef>
#include <vector>

#include "stablefield/mdk.hpp"
#include "stablefield/rng.hpp"

namespace stablefield {

// Normalization constant of the fractional measure family:
// c_beta = beta * 2^{1-beta} / Gamma(1-beta), beta in (0,1).
double c_beta(double beta);

// Stability index alpha and fractional order beta, bundled where both are
// needed; c() is the derived constant c_beta.
struct FractionalParams {
    double alpha = 2.0;
    double beta = 0.5;
    void validate() const;
    double c() const { return c_beta(beta); }
};

// Sign-sum exponents a(s) indexed by the sign vector s in {+-1}^d (bit j set
// means s_j = -1): a(s) = 2 * sum of cell masses over patterns eta with
// prod_j s_j^{eta_j} = -1. Size 1 << d.
std::vector<double> parity_exponents(const CellMeasureTable& cells);

// Probability that a Poisson point process with intensity r * mu hits each
// A_j with the parity prescribed by `pattern` (bit j set = odd count in A_j).
// Evaluated through the sign-sum identity; nonzero patterns use expm1 so the
// small-r regime keeps full relative accuracy.
double poisson_parity_prob(const CellMeasureTable& cells, double r, unsigned pattern);

// All 1 << d parity probabilities at once (index = pattern).
std::vector<double> poisson_parity_all(const CellMeasureTable& cells, double r);

struct MonteCarloEstimate {
    double value = 0.0;
    double se = 0.0;
    std::size_t n = 0;
};

// Brute-force check: draws independent Poisson counts per cell and counts
// how often the requested parity pattern occurs.
MonteCarloEstimate poisson_parity_brute(const CellMeasureTable& cells, double r, unsigned pattern,
                                        std::size_t n, Rng& rng);

// Mass m^{delta} that the fractional measure of order beta assigns to the
// parity cell `pattern` (nonzero): the integral of the parity probability
// against c_beta r^{-beta-1} dr. ClosedForm uses the sign-sum representation
// -2^{1-beta-d} sum_s sign * a(s)^beta; Quadrature integrates the parity
// probability directly (substituted onto bounded intervals) and exists as an
// independent cross-check of the closed form.
enum class MubetaMode { ClosedForm, Quadrature };
double mubeta_mass(const CellMeasureTable& cells, double beta, unsigned pattern,
                   MubetaMode mode = MubetaMode::ClosedForm);

// Closed-form masses for every nonzero pattern; index = pattern, [0] = 0.
std::vector<double> mubeta_masses(const CellMeasureTable& cells, double beta);

// d(x,y)^beta realized as the fractional measure of A_x symdiff A_y.
double fractional_distance(const SpacePoint& x, const SpacePoint& y, const SetFamily& family,
                           double beta, const PrecisionBudget& budget = {});

}  // namespace stablefield

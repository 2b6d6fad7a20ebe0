#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "stablefield/rng.hpp"
#include "stablefield/sampling.hpp"

using namespace stablefield;

namespace {

// mean and standard error of f(row) over a batch
template <class F>
std::pair<double, double> mean_se(const SampleBatch& b, F&& f) {
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < b.n; ++i) {
        const double v = f(i);
        sum += v;
        sum2 += v * v;
    }
    const double n = static_cast<double>(b.n);
    const double mean = sum / n;
    const double var = std::max(0.0, sum2 / n - mean * mean);
    return {mean, std::sqrt(var / n)};
}

}  // namespace

TEST_SUITE("sampling") {

TEST_CASE("gaussian endpoint has variance two") {
    Rng rng(101);
    double sum = 0.0, sum2 = 0.0;
    const std::size_t n = 100'000;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = sas_sample(2.0, 1.0, rng);
        sum += x;
        sum2 += x * x;
    }
    const double var = sum2 / static_cast<double>(n);
    // SE of the sample variance of N(0,2): sqrt(2 var^2 / n)
    const double se = std::sqrt(2.0 * 4.0 / static_cast<double>(n));
    CHECK(std::abs(var - 2.0) < 4.0 * se);
    CHECK(std::abs(sum / static_cast<double>(n)) < 4.0 * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST_CASE("cauchy endpoint has the right characteristic function") {
    Rng rng(102);
    const std::size_t n = 100'000;
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = std::cos(sas_sample(1.0, 1.0, rng));
        sum += c;
        sum2 += c * c;
    }
    const double mean = sum / static_cast<double>(n);
    const double se =
        std::sqrt(std::max(0.0, sum2 / static_cast<double>(n) - mean * mean) /
                  static_cast<double>(n));
    CHECK(std::abs(mean - std::exp(-1.0)) < 4.0 * se);
}

TEST_CASE("interior alpha matches its characteristic function") {
    Rng rng(103);
    const std::size_t n = 100'000;
    const double alpha = 1.4, sigma = 0.8, theta = 1.3;
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double c = std::cos(theta * sas_sample(alpha, sigma, rng));
        sum += c;
        sum2 += c * c;
    }
    const double mean = sum / static_cast<double>(n);
    const double se =
        std::sqrt(std::max(0.0, sum2 / static_cast<double>(n) - mean * mean) /
                  static_cast<double>(n));
    const double target = std::exp(-std::pow(sigma * theta, alpha));
    CHECK(std::abs(mean - target) < 4.0 * se);
}

TEST_CASE("zero scale collapses to zero, bad parameters throw") {
    Rng rng(104);
    for (double alpha : {0.6, 1.0, 1.7, 2.0}) CHECK(sas_sample(alpha, 0.0, rng) == 0.0);
    CHECK_THROWS_AS(sas_sample(0.0, 1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(sas_sample(2.5, 1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(sas_sample(1.0, -1.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(positive_stable_sample(0.0, rng), std::invalid_argument);
    CHECK_THROWS_AS(positive_stable_sample(1.0, rng), std::invalid_argument);
}

TEST_CASE("positive stable laplace transform and positivity") {
    Rng rng(105);
    const std::size_t n = 100'000;
    double sum = 0.0, sum2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double xi = positive_stable_sample(0.5, rng);
        CHECK(xi > 0.0);
        const double e = std::exp(-xi);
        sum += e;
        sum2 += e * e;
    }
    const double mean = sum / static_cast<double>(n);
    const double se =
        std::sqrt(std::max(0.0, sum2 / static_cast<double>(n) - mean * mean) /
                  static_cast<double>(n));
    CHECK(std::abs(mean - std::exp(-1.0)) < 4.0 * se);

    Rng a(7), b(7);
    for (int i = 0; i < 10; ++i)
        CHECK(positive_stable_sample(0.3, a) == positive_stable_sample(0.3, b));
}

TEST_CASE("scale tables from fractional masses") {
    const auto cells = CellMeasureTable::from_masses(1, {0, 4.0});
    CHECK(fdd_scales(cells, 1.0, 0.5).sigma[1] == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(fdd_scales(cells, 2.0, 0.5).sigma[1] ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    const auto identical = CellMeasureTable::from_masses(2, {0, 0, 0, 4.0});
    const auto t = fdd_scales(identical, 2.0, 0.5);
    CHECK(t.sigma[1] == 0.0);
    CHECK(t.sigma[2] == 0.0);
    CHECK(t.sigma[3] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));

    const auto base = base_scales(cells, 2.0);
    CHECK(base.sigma[1] == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("mass rescaling moves every scale by c^{beta/alpha}") {
    Rng rng(106);
    std::vector<double> m{0, 0.7, 1.9, 0.25, 3.0, 0.1, 0.0, 2.2};
    const auto cells = CellMeasureTable::from_masses(3, m);
    const double c = 3.7, alpha = 1.6, beta = 0.4;
    std::vector<double> scaled = m;
    for (double& v : scaled) v *= c;
    const auto t0 = fdd_scales(cells, alpha, beta);
    const auto t1 = fdd_scales(CellMeasureTable::from_masses(3, scaled), alpha, beta);
    const double factor = std::pow(c, beta / alpha);
    for (std::size_t pat = 1; pat < 8; ++pat)
        CHECK(t1.sigma[pat] == doctest::Approx(factor * t0.sigma[pat]).epsilon(1e-12));
}

TEST_CASE("the base point produces the zero field") {
    const SetFamily fam = SetFamily::separating(SpaceKind::Euclidean1);
    const auto batch =
        sample_field({SpacePoint::origin(SpaceKind::Euclidean1)}, fam, 1.5, 0.5, 2000, 99);
    for (double v : batch.values) CHECK(v == 0.0);
}

TEST_CASE("coordinates reconstruct exactly from logged components") {
    StableScaleTable scales;
    scales.d = 3;
    scales.alpha = 1.2;
    scales.sigma = {0, 0.5, 1.0, 0.2, 0.8, 0.0, 1.5, 0.3};
    const auto batch = sample_fdd(scales, 500, 2024, 1, true);
    REQUIRE(batch.components.size() == 500 * 8);
    for (std::size_t i = 0; i < batch.n; ++i) {
        for (int j = 0; j < 3; ++j) {
            double acc = 0.0;
            for (unsigned pat = 1; pat < 8; ++pat)
                if (pat & (1u << j)) acc += batch.component(i, pat);
            CHECK(batch.value(i, j) == acc);
        }
        CHECK(batch.component(i, 5) == 0.0);  // sigma 0 never draws
    }
}

TEST_CASE("batches are reproducible and thread-count independent") {
    StableScaleTable scales;
    scales.d = 2;
    scales.alpha = 1.7;
    scales.sigma = {0, 1.0, 0.5, 0.25};
    const auto a = sample_fdd(scales, 10'000, 31, 1);
    const auto b = sample_fdd(scales, 10'000, 31, 4);
    CHECK(a.values == b.values);
    const auto c = sample_fdd(scales, 10'000, 32, 1);
    CHECK(a.values != c.values);

    const auto cells = CellMeasureTable::from_masses(2, {0, 1.0, 2.0, 0.5});
    const auto s1 = sample_substable(cells, 1.0, 2.0, 10'000, 77, 1);
    const auto s2 = sample_substable(cells, 1.0, 2.0, 10'000, 77, 3);
    CHECK(s1.values == s2.values);
}

TEST_CASE("marginals are symmetric") {
    StableScaleTable scales;
    scales.d = 1;
    scales.alpha = 1.5;
    scales.sigma = {0, 1.0};
    const auto batch = sample_fdd(scales, 100'000, 13);
    double signs = 0.0;
    for (std::size_t i = 0; i < batch.n; ++i)
        signs += (batch.value(i, 0) > 0.0) ? 1.0 : (batch.value(i, 0) < 0.0 ? -1.0 : 0.0);
    CHECK(std::abs(signs / static_cast<double>(batch.n)) <
          4.0 / std::sqrt(static_cast<double>(batch.n)));
}

TEST_CASE("joint law matches the analytic characteristic function") {
    StableScaleTable scales;
    scales.d = 2;
    scales.alpha = 1.5;
    scales.sigma = {0, 0.9, 0.6, 0.4};
    const auto batch = sample_fdd(scales, 100'000, 2718);
    const std::vector<double> theta{0.7, -0.4};
    auto [mean, se] = mean_se(batch, [&](std::size_t i) {
        return std::cos(theta[0] * batch.value(i, 0) + theta[1] * batch.value(i, 1));
    });
    CHECK(std::abs(mean - fdd_cf(theta, scales)) < 4.0 * se);
    CHECK(fdd_cf(std::vector<double>{0.0, 0.0}, scales) == doctest::Approx(1.0));
}

TEST_CASE("gaussian pair covariance matches the three-measure formula") {
    // masses of {A_1, A_3} on the line: mu_a = 1, mu_b = 3, symm diff = 2
    const SetFamily fam = SetFamily::separating(SpaceKind::Euclidean1);
    const auto batch = sample_field({SpacePoint::r1(1.0), SpacePoint::r1(3.0)}, fam, 2.0, 0.5,
                                    100'000, 5150);
    auto [mean, se] =
        mean_se(batch, [&](std::size_t i) { return batch.value(i, 0) * batch.value(i, 1); });
    const double target = 1.0 + std::sqrt(3.0) - std::sqrt(2.0);
    CHECK(std::abs(mean - target) < 4.0 * se);
}

TEST_CASE("sub-stable marginal and joint characteristic functions") {
    const auto one = CellMeasureTable::from_masses(1, {0, 1.0});
    const auto batch = sample_substable(one, 1.0, 2.0, 100'000, 616);
    auto [mean, se] = mean_se(batch, [&](std::size_t i) { return std::cos(batch.value(i, 0)); });
    CHECK(std::abs(mean - std::exp(-1.0)) < 4.0 * se);
    CHECK(substable_cf(std::vector<double>{1.0}, one, 1.0, 2.0) ==
          doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(substable_cf(std::vector<double>{0.0}, one, 1.0, 2.0) == doctest::Approx(1.0));

    const auto pair = CellMeasureTable::from_masses(2, {0, 0.0, 2.0, 1.0});
    const auto joint = sample_substable(pair, 1.0, 2.0, 100'000, 617);
    const std::vector<double> theta{0.8, -0.3};
    auto [jm, jse] = mean_se(joint, [&](std::size_t i) {
        return std::cos(theta[0] * joint.value(i, 0) + theta[1] * joint.value(i, 1));
    });
    CHECK(std::abs(jm - substable_cf(theta, pair, 1.0, 2.0)) < 4.0 * jse);

    CHECK_THROWS_AS(sample_substable(one, 2.0, 2.0, 1000, 1), std::invalid_argument);
    CHECK_THROWS_AS(sample_substable(one, 1.5, 1.0, 1000, 1), std::invalid_argument);
}

}  // TEST_SUITE

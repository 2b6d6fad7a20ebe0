#include "stablefield/sampling.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "stablefield/parity.hpp"

namespace stablefield {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kBlock = 4096;

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

void check_alpha(double alpha) {
    require(alpha > 0.0 && alpha <= 2.0, "alpha must lie in (0,2]");
}

}  // namespace

double sas_sample(double alpha, double sigma, Rng& rng) {
    check_alpha(alpha);
    require(std::isfinite(sigma) && sigma >= 0.0, "sigma must be >= 0");
    if (sigma == 0.0) return 0.0;
    if (alpha == 2.0) return sigma * std::sqrt(2.0) * rng.normal();
    if (alpha == 1.0) return sigma * std::tan(kPi * (rng.uniform_open() - 0.5));
    const double u = kPi * (rng.uniform_open() - 0.5);  // (-pi/2, pi/2)
    const double w = rng.exponential();
    const double cu = std::cos(u);
    const double x = std::sin(alpha * u) / std::pow(cu, 1.0 / alpha) *
                     std::pow(std::cos((1.0 - alpha) * u) / w, (1.0 - alpha) / alpha);
    return sigma * x;
}

double positive_stable_sample(double gamma, Rng& rng) {
    require(gamma > 0.0 && gamma < 1.0, "positive stable index must lie in (0,1)");
    const double u = kPi * rng.uniform_open();  // (0, pi)
    const double w = rng.exponential();
    const double su = std::sin(u);
    const double a = std::pow(std::sin(gamma * u), gamma / (1.0 - gamma)) *
                     std::sin((1.0 - gamma) * u) / std::pow(su, 1.0 / (1.0 - gamma));
    return std::pow(a / w, (1.0 - gamma) / gamma);
}

void StableScaleTable::validate() const {
    require(d >= 1 && d <= 8, "scale table dimension must be 1..8");
    require(sigma.size() == (std::size_t{1} << d), "scale table size mismatch");
    require(sigma[0] == 0.0, "empty-pattern scale must be 0");
    for (double s : sigma) require(std::isfinite(s) && s >= 0.0, "scales must be >= 0");
    check_alpha(alpha);
}

StableScaleTable fdd_scales(const CellMeasureTable& cells, const FractionalParams& params) {
    params.validate();
    const auto masses = mubeta_masses(cells, params.beta);
    StableScaleTable t;
    t.d = cells.d;
    t.alpha = params.alpha;
    t.sigma.assign(masses.size(), 0.0);
    for (std::size_t i = 1; i < masses.size(); ++i)
        t.sigma[i] = std::pow(masses[i], 1.0 / params.alpha);
    t.validate();
    return t;
}

StableScaleTable base_scales(const CellMeasureTable& cells, double alpha) {
    check_alpha(alpha);
    cells.validate();
    StableScaleTable t;
    t.d = cells.d;
    t.alpha = alpha;
    t.sigma.assign(cells.mass.size(), 0.0);
    for (std::size_t i = 1; i < cells.mass.size(); ++i)
        t.sigma[i] = std::pow(cells.mass[i], 1.0 / alpha);
    t.validate();
    return t;
}

std::size_t sample_block_length() { return kBlock; }

void run_blocks(std::size_t nblocks, int threads, const std::function<void(std::size_t)>& fn) {
    if (threads <= 1 || nblocks <= 1) {
        for (std::size_t b = 0; b < nblocks; ++b) fn(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t b = next.fetch_add(1);
            if (b >= nblocks) return;
            fn(b);
        }
    };
    std::vector<std::thread> pool;
    const int nt = std::min<int>(threads, static_cast<int>(nblocks));
    pool.reserve(static_cast<std::size_t>(nt));
    for (int i = 0; i < nt; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
}

SampleBatch sample_fdd(const StableScaleTable& scales, std::size_t n, std::uint64_t seed,
                       int threads, bool log_components) {
    scales.validate();
    require(n > 0, "need at least one sample");
    const int d = scales.d;
    const std::size_t ncells = std::size_t{1} << d;
    SampleBatch batch;
    batch.d = d;
    batch.n = n;
    batch.alpha = scales.alpha;
    batch.seed = seed;
    batch.values.assign(n * static_cast<std::size_t>(d), 0.0);
    if (log_components) batch.components.assign(n * ncells, 0.0);

    const std::size_t nblocks = (n + kBlock - 1) / kBlock;
    run_blocks(nblocks, threads, [&](std::size_t b) {
        Rng rng(derive_seed(seed, b));
        const std::size_t lo = b * kBlock;
        const std::size_t hi = std::min(n, lo + kBlock);
        std::vector<double> s(ncells, 0.0);
        for (std::size_t i = lo; i < hi; ++i) {
            for (std::size_t pat = 1; pat < ncells; ++pat)
                s[pat] = (scales.sigma[pat] > 0.0)
                             ? sas_sample(scales.alpha, scales.sigma[pat], rng)
                             : 0.0;
            double* row = &batch.values[i * static_cast<std::size_t>(d)];
            for (int j = 0; j < d; ++j) {
                double acc = 0.0;
                for (std::size_t pat = 1; pat < ncells; ++pat)
                    if (pat & (std::size_t{1} << j)) acc += s[pat];
                row[j] = acc;
            }
            if (log_components)
                std::copy(s.begin(), s.end(), batch.components.begin() + i * ncells);
        }
    });
    return batch;
}

SampleBatch sample_field(const std::vector<SpacePoint>& points, const SetFamily& family,
                         double alpha, std::optional<double> beta, std::size_t n,
                         std::uint64_t seed, const PrecisionBudget& budget, int threads) {
    const CellMeasureTable cells = cell_measures(points, family, budget);
    const StableScaleTable scales =
        beta ? fdd_scales(cells, alpha, *beta) : base_scales(cells, alpha);
    SampleBatch batch = sample_fdd(scales, n, seed, threads);
    batch.beta = beta;
    return batch;
}

SampleBatch sample_substable(const CellMeasureTable& cells, double alpha, double alpha_prime,
                             std::size_t n, std::uint64_t seed, int threads) {
    check_alpha(alpha_prime);
    require(alpha > 0.0 && alpha < alpha_prime, "need 0 < alpha < alpha_prime <= 2");
    require(n > 0, "need at least one sample");
    const StableScaleTable scales = base_scales(cells, alpha_prime);
    const int d = scales.d;
    const std::size_t ncells = std::size_t{1} << d;
    const double gamma = alpha / alpha_prime;

    SampleBatch batch;
    batch.d = d;
    batch.n = n;
    batch.alpha = alpha;
    batch.alpha_prime = alpha_prime;
    batch.seed = seed;
    batch.values.assign(n * static_cast<std::size_t>(d), 0.0);

    const std::size_t nblocks = (n + kBlock - 1) / kBlock;
    run_blocks(nblocks, threads, [&](std::size_t b) {
        Rng rng(derive_seed(seed, b));
        const std::size_t lo = b * kBlock;
        const std::size_t hi = std::min(n, lo + kBlock);
        std::vector<double> s(ncells, 0.0);
        for (std::size_t i = lo; i < hi; ++i) {
            const double factor = std::pow(positive_stable_sample(gamma, rng), 1.0 / alpha_prime);
            for (std::size_t pat = 1; pat < ncells; ++pat)
                s[pat] = (scales.sigma[pat] > 0.0)
                             ? sas_sample(alpha_prime, scales.sigma[pat], rng)
                             : 0.0;
            double* row = &batch.values[i * static_cast<std::size_t>(d)];
            for (int j = 0; j < d; ++j) {
                double acc = 0.0;
                for (std::size_t pat = 1; pat < ncells; ++pat)
                    if (pat & (std::size_t{1} << j)) acc += s[pat];
                row[j] = factor * acc;
            }
        }
    });
    return batch;
}

double fdd_cf(std::span<const double> theta, const StableScaleTable& scales) {
    scales.validate();
    require(theta.size() == static_cast<std::size_t>(scales.d), "theta dimension mismatch");
    double expo = 0.0;
    const std::size_t ncells = std::size_t{1} << scales.d;
    for (std::size_t pat = 1; pat < ncells; ++pat) {
        double t = 0.0;
        for (int j = 0; j < scales.d; ++j)
            if (pat & (std::size_t{1} << j)) t += theta[static_cast<std::size_t>(j)];
        expo += std::pow(scales.sigma[pat] * std::abs(t), scales.alpha);
    }
    return std::exp(-expo);
}

double substable_cf(std::span<const double> theta, const CellMeasureTable& cells, double alpha,
                    double alpha_prime) {
    cells.validate();
    check_alpha(alpha_prime);
    require(alpha > 0.0 && alpha < alpha_prime, "need 0 < alpha < alpha_prime <= 2");
    require(theta.size() == static_cast<std::size_t>(cells.d), "theta dimension mismatch");
    double inner = 0.0;
    const std::size_t ncells = std::size_t{1} << cells.d;
    for (std::size_t pat = 1; pat < ncells; ++pat) {
        double t = 0.0;
        for (int j = 0; j < cells.d; ++j)
            if (pat & (std::size_t{1} << j)) t += theta[static_cast<std::size_t>(j)];
        inner += std::pow(std::abs(t), alpha_prime) * cells.mass[pat];
    }
    return std::exp(-std::pow(inner, alpha / alpha_prime));
}

}  // namespace stablefield

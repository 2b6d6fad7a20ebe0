#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace stablefield {

// SplitMix64 finalizer; used to derive well-separated child seeds from a
// master seed so that parallel streams never share state.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    return mix64(master ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

// Deterministic RNG: mt19937_64 core (sequence fixed by the standard) with
// hand-rolled distributions so that output streams are reproducible across
// platforms and standard-library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // uniform on [0,1)
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // uniform on (0,1), safe for log() and tan()
    double uniform_open() {
        return (static_cast<double>(eng_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + (b - a) * uniform01(); }

    // Marsaglia polar method with one cached value.
    double normal() {
        if (have_cache_) {
            have_cache_ = false;
            return cache_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform01() - 1.0;
            v = 2.0 * uniform01() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        cache_ = v * f;
        have_cache_ = true;
        return u * f;
    }

    double exponential() { return -std::log(uniform_open()); }

    bool bernoulli(double p) { return uniform01() < p; }

    // Exact Poisson sampling. Knuth inversion for small means; larger means
    // are split additively into small-mean draws, which is exact by Poisson
    // additivity and avoids underflow of exp(-mean).
    std::uint64_t poisson(double mean) {
        if (!(mean >= 0.0)) throw std::invalid_argument("poisson: mean must be >= 0");
        if (mean == 0.0) return 0;
        if (mean > 30.0) {
            const auto parts = static_cast<std::uint64_t>(std::ceil(mean / 30.0));
            std::uint64_t total = 0;
            const double part_mean = mean / static_cast<double>(parts);
            for (std::uint64_t i = 0; i < parts; ++i) total += poisson_small(part_mean);
            return total;
        }
        return poisson_small(mean);
    }

private:
    std::uint64_t poisson_small(double mean) {
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double p = uniform01();
        while (p > limit) {
            ++k;
            p *= uniform01();
        }
        return k;
    }

    std::mt19937_64 eng_;
    bool have_cache_ = false;
    double cache_ = 0.0;
};

}  // namespace stablefield

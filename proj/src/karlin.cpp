#include "stablefield/karlin.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "stablefield/parity.hpp"
#include "stablefield/quadrature.hpp"

namespace stablefield {

namespace {

constexpr double kPi = std::numbers::pi;

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

void KarlinConfig::validate() const {
    require(beta > 0.0 && beta < 1.0, "karlin beta must lie in (0,1)");
    require(alpha > 0.0 && alpha <= 2.0, "karlin alpha must lie in (0,2]");
    require(c_f > 0.0 && c_f <= 1.0, "c_f must lie in (0,1] so p_k are probabilities");
    require(std::isfinite(rho) && rho > 0.0, "rho must be > 0");
    require(truncation_tol > 0.0, "truncation tolerance must be > 0");
    if (sign.kind == SignLawKind::SymmetricPareto)
        require(sign.c_eps > 0.0, "Pareto tail constant must be > 0");
}

double KarlinConfig::p_k(std::uint64_t k) const {
    return c_f * std::pow(static_cast<double>(k), -1.0 / beta);
}

namespace {

// integral_0^inf x^{-alpha} sin(x) dx: head substituted to remove the
// endpoint singularity, oscillatory middle left to the adaptive rule, tail
// by repeated integration by parts at X = (even) * pi where sin X = 0,
// cos X = 1:  T(s) = X^{-s} - s(s+1) T(s+2).
double sine_power_integral(double alpha) {
    const double X = 200.0 * kPi;
    const double q = 2.0 / (2.0 - alpha);
    auto sinc = [](double t) { return t < 1e-8 ? 1.0 - t * t / 6.0 : std::sin(t) / t; };
    auto head = [&](double y) { return q * y * sinc(std::pow(y, q)); };
    const auto qh = integrate_adaptive(head, 0.0, std::pow(kPi, 1.0 / q), 1e-12, 1e-13, 200000);
    auto mid = [&](double x) { return std::pow(x, -alpha) * std::sin(x); };
    const auto qm = integrate_adaptive(mid, kPi, X, 1e-12, 1e-13, 400000);
    if (!qh.converged || !qm.converged)
        throw std::runtime_error("sign-law scale quadrature did not converge");
    const double x2 = X * X;
    const double tail =
        std::pow(X, -alpha) *
        (1.0 - alpha * (alpha + 1.0) / x2 * (1.0 - (alpha + 2.0) * (alpha + 3.0) / x2));
    return qh.value + qm.value + tail;
}

}  // namespace

double sigma_eps_alpha(const SignLaw& sign, double alpha) {
    if (sign.kind == SignLawKind::Rademacher) {
        require(alpha == 2.0, "Rademacher signs pair with alpha = 2");
        return 0.5;  // E eps^2 / 2
    }
    require(alpha > 0.0 && alpha < 2.0, "Pareto signs pair with alpha in (0,2)");
    require(sign.c_eps > 0.0, "Pareto tail constant must be > 0");
    static std::mutex mu;
    static std::map<double, double> cache;  // alpha -> unit integral
    double integral;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(alpha);
        if (it == cache.end()) it = cache.emplace(alpha, sine_power_integral(alpha)).first;
        integral = it->second;
    }
    return sign.c_eps * integral;
}

double b_rho(const KarlinConfig& cfg) {
    cfg.validate();
    const double scale = cfg.beta / c_beta(cfg.beta) * std::pow(cfg.rho, cfg.beta) *
                         cfg.slowly_varying_L() * sigma_eps_alpha(cfg.sign, cfg.alpha);
    return std::pow(scale, 1.0 / cfg.alpha);
}

double sample_sign(const SignLaw& sign, double alpha, Rng& rng) {
    const double s = rng.bernoulli(0.5) ? 1.0 : -1.0;
    if (sign.kind == SignLawKind::Rademacher) return s;
    // |eps| = (c_eps / U)^{1/alpha} gives P(|eps| > x) = c_eps x^{-alpha}.
    return s * std::pow(sign.c_eps / rng.uniform_open(), 1.0 / alpha);
}

double power_tail_sum(double s, std::uint64_t K) {
    require(s > 1.0, "power tail sum needs s > 1");
    auto em = [s](double a) {
        // Euler-Maclaurin for sum_{j >= a} j^{-s}, a >= 16
        const double a1 = std::pow(a, 1.0 - s);
        const double a0 = std::pow(a, -s);
        return a1 / (s - 1.0) + a0 / 2.0 + s * a0 / a / 12.0 -
               s * (s + 1.0) * (s + 2.0) * a0 / (a * a * a) / 720.0 +
               s * (s + 1.0) * (s + 2.0) * (s + 3.0) * (s + 4.0) * a0 /
                   (a * a * a * a * a) / 30240.0;
    };
    if (K >= 16) return em(static_cast<double>(K) + 1.0);
    Kahan acc;
    for (std::uint64_t j = K + 1; j <= 16; ++j)
        acc.add(std::pow(static_cast<double>(j), -s));
    acc.add(em(17.0));
    return acc.value();
}

std::uint64_t required_k_max(const KarlinConfig& cfg, double mass) {
    cfg.validate();
    require(std::isfinite(mass) && mass >= 0.0, "mass must be >= 0");
    if (mass == 0.0) return 1;
    const double s = 1.0 / cfg.beta;
    const double c = cfg.rho * cfg.c_f * mass;  // tail intensity scale
    const double target = cfg.truncation_tol / c;
    // leading-order solve of K^{1-s}/(s-1) = target, then exact bisection
    const double k0 = std::pow((s - 1.0) * target, -1.0 / (s - 1.0));
    constexpr double kCap = 4.6e18;  // ~2^62
    if (k0 > kCap) {
        std::ostringstream os;
        os << "urn truncation bound unattainable: required k_max ~ " << k0
           << " exceeds " << kCap;
        throw std::runtime_error(os.str());
    }
    std::uint64_t hi = std::max<std::uint64_t>(64, static_cast<std::uint64_t>(k0 * 2.0) + 64);
    while (c * power_tail_sum(s, hi) >= cfg.truncation_tol) {
        if (hi > static_cast<std::uint64_t>(kCap)) {
            std::ostringstream os;
            os << "urn truncation bound unattainable: required k_max exceeds " << kCap;
            throw std::runtime_error(os.str());
        }
        hi *= 2;
    }
    std::uint64_t lo = 0;  // power_tail_sum(s, 0) includes every urn
    while (hi - lo > 1) {
        const std::uint64_t mid = lo + (hi - lo) / 2;
        if (c * power_tail_sum(s, mid) < cfg.truncation_tol)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double expected_odd_count(const KarlinConfig& cfg, double mass) {
    cfg.validate();
    require(std::isfinite(mass) && mass >= 0.0, "mass must be >= 0");
    if (mass == 0.0) return 0.0;
    const std::uint64_t k_max = cfg.k_max ? cfg.k_max : required_k_max(cfg, mass);
    const double s = 1.0 / cfg.beta;
    const double c = 2.0 * cfg.rho * cfg.c_f * mass;  // x_k = c k^{-s}
    // head: direct terms until x_k is tiny, capped for safety
    std::uint64_t k1 = k_max;
    const double k1f = std::pow(c / 1e-8, cfg.beta);
    if (k1f < static_cast<double>(k_max))
        k1 = std::max<std::uint64_t>(16, static_cast<std::uint64_t>(k1f) + 1);
    k1 = std::min<std::uint64_t>(k1, 3'000'000);
    k1 = std::min(k1, k_max);
    Kahan acc;
    for (std::uint64_t k = 1; k <= k1; ++k)
        acc.add(-std::expm1(-c * std::pow(static_cast<double>(k), -s)) / 2.0);
    if (k1 < k_max) {
        // series (1 - e^{-x})/2 = x/2 - x^2/4 + x^3/12 - x^4/48 + ...
        const double coef[4] = {0.5, -0.25, 1.0 / 12.0, -1.0 / 48.0};
        double cm = 1.0;
        for (int m = 1; m <= 4; ++m) {
            cm *= c;
            const double dh = power_tail_sum(s * m, k1) - power_tail_sum(s * m, k_max);
            acc.add(coef[m - 1] * cm * dh);
        }
    }
    return acc.value();
}

namespace {

// Poisson(lambda) conditioned on >= 1, by pmf inversion; stable for tiny
// lambda via expm1.
std::uint64_t conditional_poisson_positive(double lambda, Rng& rng) {
    const double denom = -std::expm1(-lambda);
    double term = lambda * std::exp(-lambda) / denom;
    double cum = term;
    std::uint64_t t = 1;
    const double u = rng.uniform01();
    while (u > cum && t < 1000) {
        term *= lambda / static_cast<double>(t + 1);
        ++t;
        cum += term;
    }
    return t;
}

}  // namespace

UrnRealization simulate_U(const KarlinConfig& cfg, const CellMeasureTable& cells, Rng& rng) {
    cfg.validate();
    cells.validate();
    const int d = cells.d;
    const unsigned ncells = 1u << d;
    UrnRealization out;
    out.U.assign(static_cast<std::size_t>(d), 0.0);
    out.odd_counts.assign(ncells, 0);

    const double mu_union = cells.union_mass();
    if (mu_union <= 0.0) {
        out.k_max = std::max<std::uint64_t>(cfg.k_max, 1);
        return out;
    }
    const double s = 1.0 / cfg.beta;
    if (cfg.k_max == 0) {
        out.k_max = required_k_max(cfg, mu_union);
    } else {
        const double c = cfg.rho * cfg.c_f * mu_union;
        if (c * power_tail_sum(s, cfg.k_max) >= cfg.truncation_tol) {
            std::ostringstream os;
            os << "urn truncation bound unattainable at k_max = " << cfg.k_max
               << ": required k_max = " << required_k_max(cfg, mu_union);
            throw std::runtime_error(os.str());
        }
        out.k_max = cfg.k_max;
    }

    auto record = [&](std::uint64_t k, unsigned pattern) {
        if (pattern == 0) return;
        ++out.odd_counts[pattern];
        out.odd_urns.emplace_back(k, pattern);
        const double eps = sample_sign(cfg.sign, cfg.alpha, rng);
        for (int j = 0; j < d; ++j)
            if (pattern & (1u << j)) out.U[static_cast<std::size_t>(j)] += eps;
    };

    // Head: every urn whose union intensity is >= ~1e-3, parity per cell.
    const double c_union = cfg.rho * cfg.c_f * mu_union;
    out.truncated_mean = c_union * power_tail_sum(s, out.k_max);
    constexpr double kSwitch = 1e-3;
    std::uint64_t head_end = out.k_max;
    const double switch_k = std::pow(c_union / kSwitch, cfg.beta);
    if (switch_k < static_cast<double>(out.k_max))
        head_end = static_cast<std::uint64_t>(switch_k) + 1;
    for (std::uint64_t k = 1; k <= head_end; ++k) {
        const double r = cfg.rho * cfg.p_k(k);
        unsigned pattern = 0;
        for (unsigned eta = 1; eta < ncells; ++eta) {
            if (cells.mass[eta] <= 0.0) continue;
            if (rng.bernoulli(-std::expm1(-2.0 * r * cells.mass[eta]) / 2.0)) pattern ^= eta;
        }
        record(k, pattern);
    }
    out.head_urns = head_end;
    if (head_end >= out.k_max) return out;

    // Tail: skip-sample occupied urns against the exact cumulative
    // intensity Lambda(a,b] = c_union * (tail(a) - tail(b)).
    std::vector<double> cum(ncells, 0.0);
    {
        double acc = 0.0;
        for (unsigned eta = 1; eta < ncells; ++eta) {
            acc += cells.mass[eta];
            cum[eta] = acc / mu_union;
        }
    }
    const double tail_kmax = power_tail_sum(s, out.k_max);
    std::uint64_t cur = head_end;
    double tail_cur = power_tail_sum(s, cur);
    while (true) {
        const double tau = tail_cur - rng.exponential() / c_union;
        if (tau <= tail_kmax) break;  // next occupied urn lies beyond k_max
        std::uint64_t lo = cur, hi = out.k_max;
        // invariant: tail(lo) > tau >= tail(hi)
        while (hi - lo > 1) {
            const std::uint64_t mid = lo + (hi - lo) / 2;
            if (power_tail_sum(s, mid) <= tau)
                hi = mid;
            else
                lo = mid;
        }
        const std::uint64_t k = hi;
        const double lambda = c_union * std::pow(static_cast<double>(k), -s);
        const std::uint64_t points = conditional_poisson_positive(lambda, rng);
        unsigned pattern = 0;
        for (std::uint64_t p = 0; p < points; ++p) {
            const double u = rng.uniform01();
            unsigned eta = 1;
            while (eta < ncells - 1 && u >= cum[eta]) ++eta;
            pattern ^= eta;
        }
        record(k, pattern);
        ++out.tail_urns;
        cur = k;
        tail_cur = power_tail_sum(s, cur);
        if (cur >= out.k_max) break;
    }
    return out;
}

UrnRealization simulate_U(const KarlinConfig& cfg, std::span<const SpacePoint> points,
                          const SetFamily& family, Rng& rng, const PrecisionBudget& budget) {
    const std::vector<SpacePoint> pts(points.begin(), points.end());
    return simulate_U(cfg, cell_measures(pts, family, budget), rng);
}

MLimitInfo m_statistic_limit(const CellMeasureTable& cells, const KarlinConfig& cfg,
                             unsigned pattern) {
    cfg.validate();
    const double m = mubeta_mass(cells, cfg.beta, pattern);
    MLimitInfo info;
    info.normalized_limit = m / sigma_eps_alpha(cfg.sign, cfg.alpha);
    info.mean_rate = cfg.beta / c_beta(cfg.beta) * m;
    return info;
}

std::complex<double> limit_cf(std::span<const double> theta, const CellMeasureTable& cells,
                              double alpha, double beta, const SignLaw&) {
    require(alpha > 0.0 && alpha <= 2.0, "alpha must lie in (0,2]");
    require(theta.size() == static_cast<std::size_t>(cells.d), "theta dimension mismatch");
    const auto masses = mubeta_masses(cells, beta);
    double expo = 0.0;
    for (unsigned pat = 1; pat < masses.size(); ++pat) {
        double t = 0.0;
        for (int j = 0; j < cells.d; ++j)
            if (pat & (1u << j)) t += theta[static_cast<std::size_t>(j)];
        expo += std::pow(std::abs(t), alpha) * masses[pat];
    }
    return {std::exp(-expo), 0.0};
}

}  // namespace stablefield

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

namespace stablefield {

// Neumaier compensated accumulator.
class Kahan {
public:
    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;       // estimated absolute error
    std::size_t evals = 0;    // integrand evaluations
    bool converged = true;    // false when the evaluation budget ran out
};

struct VectorQuadratureResult {
    std::vector<double> value;
    double error = 0.0;       // estimated absolute error, L1 over components
    std::size_t evals = 0;
    bool converged = true;
};

namespace detail {

// Gauss 7 / Kronrod 15 nodes and weights on [-1,1] (positive half).
inline constexpr double kKronrodNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
};
inline constexpr double kKronrodWeights[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
};
// Gauss weights attach to Kronrod nodes 1, 3, 5, 7.
inline constexpr double kGaussWeights[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
};

}  // namespace detail

// Vector-valued integrand: writes `dim` components at abscissa t.
using VectorIntegrand = std::function<void(double, std::span<double>)>;

// One Gauss-Kronrod 15 panel over [a,b]. Appends the Kronrod estimate to
// `value` (overwrites) and returns the L1 discrepancy against the embedded
// Gauss rule, which serves as the panel error estimate.
inline double gk15_panel(const VectorIntegrand& f, std::size_t dim, double a, double b,
                         std::vector<double>& value, std::vector<double>& scratch) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    std::vector<double> kronrod(dim, 0.0), gauss(dim, 0.0);
    scratch.resize(dim);
    for (int i = 0; i < 8; ++i) {
        const double off = h * detail::kKronrodNodes[i];
        const int reps = (i == 7) ? 1 : 2;
        for (int r = 0; r < reps; ++r) {
            const double t = (r == 0) ? c - off : c + off;
            f(t, scratch);
            for (std::size_t k = 0; k < dim; ++k) {
                kronrod[k] += detail::kKronrodWeights[i] * scratch[k];
                if (i % 2 == 1) gauss[k] += detail::kGaussWeights[i / 2] * scratch[k];
            }
        }
    }
    double err = 0.0;
    value.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        value[k] = h * kronrod[k];
        err += std::abs(h * (kronrod[k] - gauss[k]));
    }
    return err;
}

// Globally adaptive bisection on [a,b]. Intervals are refined worst-first
// until the summed error estimate meets max(abs_tol, rel_tol * |result|_1)
// or the evaluation budget is exhausted (flagged via `converged`).
inline VectorQuadratureResult integrate_adaptive_vec(const VectorIntegrand& f, std::size_t dim,
                                                     double a, double b, double abs_tol,
                                                     double rel_tol, std::size_t max_evals) {
    if (!(b > a)) throw std::invalid_argument("integrate_adaptive_vec: empty interval");
    struct Interval {
        double a, b, err;
        std::vector<double> value;
    };
    std::vector<Interval> heap;  // max-heap on err, maintained manually
    auto heap_less = [](const Interval& x, const Interval& y) { return x.err < y.err; };

    std::vector<double> scratch;
    VectorQuadratureResult res;
    res.value.assign(dim, 0.0);

    Interval first{a, b, 0.0, {}};
    first.err = gk15_panel(f, dim, a, b, first.value, scratch);
    res.evals += 15;
    heap.push_back(std::move(first));

    double total_err = heap.front().err;
    auto tolerance_met = [&]() {
        double norm = 0.0;
        for (const auto& iv : heap)
            for (double v : iv.value) norm += std::abs(v);
        return total_err <= std::max(abs_tol, rel_tol * norm);
    };

    while (!tolerance_met()) {
        if (res.evals + 30 > max_evals) {
            res.converged = false;
            break;
        }
        std::pop_heap(heap.begin(), heap.end(), heap_less);
        Interval worst = std::move(heap.back());
        heap.pop_back();
        total_err -= worst.err;

        const double mid = 0.5 * (worst.a + worst.b);
        if (!(worst.a < mid && mid < worst.b)) {  // interval at machine resolution
            total_err += worst.err;
            heap.push_back(std::move(worst));
            std::push_heap(heap.begin(), heap.end(), heap_less);
            res.converged = false;
            break;
        }
        Interval left{worst.a, mid, 0.0, {}};
        Interval right{mid, worst.b, 0.0, {}};
        left.err = gk15_panel(f, dim, left.a, left.b, left.value, scratch);
        right.err = gk15_panel(f, dim, right.a, right.b, right.value, scratch);
        res.evals += 30;
        total_err += left.err + right.err;
        heap.push_back(std::move(left));
        std::push_heap(heap.begin(), heap.end(), heap_less);
        heap.push_back(std::move(right));
        std::push_heap(heap.begin(), heap.end(), heap_less);
    }

    std::vector<Kahan> acc(dim);
    for (const auto& iv : heap)
        for (std::size_t k = 0; k < dim; ++k) acc[k].add(iv.value[k]);
    for (std::size_t k = 0; k < dim; ++k) res.value[k] = acc[k].value();
    res.error = total_err;
    return res;
}

inline QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a,
                                           double b, double abs_tol, double rel_tol,
                                           std::size_t max_evals) {
    auto wrapped = [&f](double t, std::span<double> out) { out[0] = f(t); };
    VectorQuadratureResult v = integrate_adaptive_vec(wrapped, 1, a, b, abs_tol, rel_tol, max_evals);
    return {v.value[0], v.error, v.evals, v.converged};
}

}  // namespace stablefield

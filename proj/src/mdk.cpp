#include "stablefield/mdk.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "stablefield/quadrature.hpp"

namespace stablefield {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

// ---------------------------------------------------------------------------
// Separators
// ---------------------------------------------------------------------------

Separator Separator::hyperplane(SpaceKind kind, const Vec3& dir, double offset) {
    Separator h;
    h.kind = kind;
    h.dir = dir;
    h.offset = offset;
    h.validate();
    return h;
}

Separator Separator::great_circle(const Vec3& pole) {
    Separator h;
    h.kind = SpaceKind::Sphere2;
    h.pole = pole;
    h.validate();
    return h;
}

Separator Separator::disc_geodesic(double phi, double psi) {
    Separator h;
    h.kind = SpaceKind::HyperbolicDisc;
    h.phi = phi;
    h.psi = psi;
    h.validate();
    return h;
}

void Separator::validate() const {
    switch (kind) {
        case SpaceKind::Euclidean1:
        case SpaceKind::Euclidean2:
        case SpaceKind::Euclidean3: {
            require(std::isfinite(offset) && offset > 0.0, "separator offset must be > 0");
            require(std::abs(norm(dir) - 1.0) <= 1e-9, "separator direction must be unit");
            const int n = space_dim(kind);
            for (int i = n; i < 3; ++i) require(dir[i] == 0.0, "unused direction entries must be 0");
            break;
        }
        case SpaceKind::Sphere2:
            require(std::abs(norm(pole) - 1.0) <= 1e-9, "separator pole must be unit");
            break;
        case SpaceKind::HyperbolicDisc:
            require(phi > 0.0 && phi <= kPi / 2.0 && std::isfinite(psi),
                    "geodesic needs phi in (0, pi/2]");
            break;
    }
}

bool separates(const Separator& h, const SpacePoint& x) {
    require(h.kind == x.kind, "separates: mismatched spaces");
    switch (h.kind) {
        case SpaceKind::Euclidean1:
        case SpaceKind::Euclidean2:
        case SpaceKind::Euclidean3:
            return h.offset < dot(h.dir, x.coords);  // offset > 0 by construction
        case SpaceKind::Sphere2: {
            const Vec3 o = SpacePoint::origin(SpaceKind::Sphere2).coords;
            return dot(h.pole, x.coords) * dot(h.pole, o) < 0.0;
        }
        case SpaceKind::HyperbolicDisc: {
            const std::complex<double> center = std::polar(1.0 / std::cos(h.phi), h.psi);
            return std::abs(x.z() - center) < std::tan(h.phi);
        }
    }
    throw std::logic_error("separates: bad kind");
}

// ---------------------------------------------------------------------------
// SetFamily
// ---------------------------------------------------------------------------

SetFamily SetFamily::box(int n) {
    require(n >= 1 && n <= 3, "box family dimension must be 1..3");
    SetFamily f;
    f.tag = Tag::Box;
    f.space = (n == 1) ? SpaceKind::Euclidean1 : (n == 2) ? SpaceKind::Euclidean2
                                                          : SpaceKind::Euclidean3;
    return f;
}

int SetFamily::box_dim() const {
    require(tag == Tag::Box, "box_dim on non-box family");
    return space_dim(space);
}

std::string SetFamily::name() const {
    if (tag == Tag::Separating) return space_name(space);
    return "box" + std::to_string(space_dim(space));
}

SetFamily SetFamily::from_name(const std::string& s) {
    if (s == "box") return box(2);
    if (s == "box1") return box(1);
    if (s == "box2") return box(2);
    if (s == "box3") return box(3);
    return separating(space_from_name(s));
}

// ---------------------------------------------------------------------------
// CellMeasureTable
// ---------------------------------------------------------------------------

std::string cell_method_name(CellMethod m) {
    switch (m) {
        case CellMethod::Exact: return "exact";
        case CellMethod::Quadrature: return "quadrature";
        case CellMethod::MonteCarlo: return "monte-carlo";
    }
    throw std::logic_error("cell_method_name: bad method");
}

CellMethod cell_method_from_name(const std::string& s) {
    if (s == "exact") return CellMethod::Exact;
    if (s == "quadrature") return CellMethod::Quadrature;
    if (s == "monte-carlo") return CellMethod::MonteCarlo;
    throw std::invalid_argument("unknown cell method: " + s);
}

double CellMeasureTable::mass_of(unsigned mask) const {
    require(mask < mass.size(), "cell mask out of range");
    return mass[mask];
}

double CellMeasureTable::marginal(int j) const {
    require(j >= 0 && j < d, "marginal index out of range");
    double s = 0;
    for (unsigned m = 1; m < mass.size(); ++m)
        if (m & (1u << j)) s += mass[m];
    return s;
}

double CellMeasureTable::union_mass() const {
    double s = 0;
    for (unsigned m = 1; m < mass.size(); ++m) s += mass[m];
    return s;
}

void CellMeasureTable::validate() const {
    require(d >= 1 && d <= 8, "cell table dimension must be 1..8");
    require(mass.size() == (1u << d), "cell table size mismatch");
    require(mass[0] == 0.0, "empty-pattern mass must be 0");
    for (double v : mass) require(std::isfinite(v) && v >= 0.0, "cell masses must be >= 0");
    require(std::isfinite(err) && err >= 0.0, "cell table error must be >= 0");
}

CellMeasureTable CellMeasureTable::from_masses(int d, std::vector<double> masses,
                                               CellMethod method, double err) {
    CellMeasureTable t;
    t.d = d;
    t.mass = std::move(masses);
    require(t.mass.size() == (1u << d), "from_masses: size must be 1<<d");
    t.mass[0] = 0.0;
    t.method = method;
    t.err = err;
    t.validate();
    return t;
}

std::string mask_to_bits(unsigned mask, int d) {
    std::string s(static_cast<std::size_t>(d), '0');
    for (int j = 0; j < d; ++j)
        if (mask & (1u << j)) s[static_cast<std::size_t>(j)] = '1';
    return s;
}

unsigned bits_to_mask(const std::string& bits) {
    require(!bits.empty() && bits.size() <= 8, "bit string length must be 1..8");
    unsigned m = 0;
    for (std::size_t j = 0; j < bits.size(); ++j) {
        require(bits[j] == '0' || bits[j] == '1', "bit string must contain only 0/1");
        if (bits[j] == '1') m |= 1u << j;
    }
    return m;
}

// ---------------------------------------------------------------------------
// Measure engines.
//
// Every separating family factorizes as (outer angle parameters) x (a 1-D
// fiber along which each A_x cuts a single interval with a closed-form
// measure). Within a fiber the Boolean cell masses are computed exactly from
// sorted breakpoints; only the outer integral is numerical. The invariant
// measure in fiber coordinates:
//   r1:  r in (0, inf), dr, directions {+1,-1};
//   r2:  theta in [0,2pi), fiber r, dr d(theta);
//   r3:  z in [-1,1], v in [0,2pi), fiber r;
//   s2:  pole (u,v), fiber u with weight sin(u) du, outer v;
//   h2:  (phi,psi), fiber phi with weight sin(phi)^{-2} d(phi), outer psi.
// All raw masses get one space constant (calibrate_normalization) so that
// mu(A_x) = d(x, o).
// ---------------------------------------------------------------------------

namespace {

// Indicator of A_p, or of A_p symdiff A_ref when ref is present.
struct MemberSpec {
    SpacePoint p;
    std::optional<SpacePoint> ref;
};

constexpr int kMaxConstituents = 16;

struct SpecLayout {
    // Flattened constituent points with per-spec indices (idx1 < 0: none).
    std::vector<SpacePoint> pts;
    struct Pair {
        int idx0;
        int idx1;
    };
    std::vector<Pair> specs;

    explicit SpecLayout(const std::vector<MemberSpec>& ms) {
        for (const auto& s : ms) {
            Pair pr{static_cast<int>(pts.size()), -1};
            pts.push_back(s.p);
            if (s.ref) {
                pr.idx1 = static_cast<int>(pts.size());
                pts.push_back(*s.ref);
            }
            specs.push_back(pr);
        }
        require(pts.size() <= kMaxConstituents, "too many constituent points");
    }
};

// Sweeps the fiber [lo, hi] split at `breaks` (sorted, clipped to (lo,hi)).
// For each subinterval with a nonzero membership pattern at its midpoint,
// adds the closed-form fiber mass to out[pattern-1]. Intervals with pattern
// zero are skipped before mass evaluation, which keeps improper fiber ends
// (r -> inf, phi -> 0) out of the arithmetic.
template <class BitsFn, class MassFn>
void sweep_fiber(double lo, double hi, std::span<const double> breaks, BitsFn&& bits_at,
                 MassFn&& mass_of, std::span<double> out) {
    double a = lo;
    const std::size_t m = breaks.size();
    for (std::size_t i = 0; i <= m; ++i) {
        const double b = (i < m) ? breaks[i] : hi;
        if (b > a) {
            const unsigned pat = bits_at(0.5 * (a + b));
            if (pat != 0) out[pat - 1] += mass_of(a, b);
            a = b;
        }
    }
}

struct RawResult {
    std::vector<double> mass;  // (1<<d)-1 raw cell masses, pattern-1 indexed
    double err = 0.0;
    std::size_t evals = 0;
    bool converged = true;
};

// --- r1: exact half-line sweep over directions +1/-1 ---------------------

RawResult raw_euclidean1(const SpecLayout& L) {
    const std::size_t dim = (1u << L.specs.size()) - 1;
    RawResult res;
    res.mass.assign(dim, 0.0);
    std::array<double, kMaxConstituents> tau{};
    std::array<double, kMaxConstituents> breaks{};
    for (double s : {1.0, -1.0}) {
        std::size_t nb = 0;
        for (std::size_t c = 0; c < L.pts.size(); ++c) {
            tau[c] = s * L.pts[c].coords[0];
            if (tau[c] > 0.0) breaks[nb++] = tau[c];
        }
        if (nb == 0) continue;
        std::sort(breaks.begin(), breaks.begin() + nb);
        auto bits = [&](double mid) {
            unsigned pat = 0;
            for (std::size_t j = 0; j < L.specs.size(); ++j) {
                const auto& sp = L.specs[j];
                bool b = mid < tau[static_cast<std::size_t>(sp.idx0)];
                if (sp.idx1 >= 0) b ^= mid < tau[static_cast<std::size_t>(sp.idx1)];
                if (b) pat |= 1u << j;
            }
            return pat;
        };
        auto len = [](double a, double b) { return b - a; };
        sweep_fiber(0.0, breaks[nb - 1], std::span<const double>(breaks.data(), nb), bits, len,
                    std::span<double>(res.mass));
        res.evals += nb;
    }
    return res;
}

// --- shared Euclidean fiber for a given direction ------------------------

void euclidean_fiber(const SpecLayout& L, const Vec3& s, std::span<double> out) {
    std::array<double, kMaxConstituents> tau{};
    std::array<double, kMaxConstituents> breaks{};
    std::size_t nb = 0;
    for (std::size_t c = 0; c < L.pts.size(); ++c) {
        tau[c] = dot(s, L.pts[c].coords);
        if (tau[c] > 0.0) breaks[nb++] = tau[c];
    }
    if (nb == 0) return;
    std::sort(breaks.begin(), breaks.begin() + nb);
    auto bits = [&](double mid) {
        unsigned pat = 0;
        for (std::size_t j = 0; j < L.specs.size(); ++j) {
            const auto& sp = L.specs[j];
            bool b = mid < tau[static_cast<std::size_t>(sp.idx0)];
            if (sp.idx1 >= 0) b ^= mid < tau[static_cast<std::size_t>(sp.idx1)];
            if (b) pat |= 1u << j;
        }
        return pat;
    };
    auto len = [](double a, double b) { return b - a; };
    sweep_fiber(0.0, breaks[nb - 1], std::span<const double>(breaks.data(), nb), bits, len, out);
}

RawResult raw_euclidean2(const SpecLayout& L, const PrecisionBudget& budget) {
    const std::size_t dim = (1u << L.specs.size()) - 1;
    std::size_t fiber_evals = 0;
    auto integrand = [&](double theta, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        euclidean_fiber(L, Vec3{std::cos(theta), std::sin(theta), 0.0}, out);
        ++fiber_evals;
    };
    auto q = integrate_adaptive_vec(integrand, dim, 0.0, kTwoPi, budget.abs_tol, budget.rel_tol,
                                    budget.max_evals);
    return {std::move(q.value), q.error, fiber_evals, q.converged};
}

RawResult raw_euclidean3(const SpecLayout& L, const PrecisionBudget& budget) {
    const std::size_t dim = (1u << L.specs.size()) - 1;
    std::size_t fiber_evals = 0;
    double inner_err_sum = 0.0;
    std::size_t inner_calls = 0;
    bool inner_converged = true;
    const double inner_abs = std::max(budget.abs_tol / 30.0, 3e-10);
    const double inner_rel = budget.rel_tol / 10.0;
    auto outer = [&](double z, std::span<double> out) {
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        auto inner = [&](double v, std::span<double> oi) {
            std::fill(oi.begin(), oi.end(), 0.0);
            euclidean_fiber(L, Vec3{rho * std::cos(v), rho * std::sin(v), z}, oi);
            ++fiber_evals;
        };
        auto qi = integrate_adaptive_vec(inner, dim, 0.0, kTwoPi, inner_abs, inner_rel, 6000);
        std::copy(qi.value.begin(), qi.value.end(), out.begin());
        inner_err_sum += qi.error;
        ++inner_calls;
        inner_converged = inner_converged && qi.converged;
    };
    const std::size_t outer_cap = std::max<std::size_t>(120, budget.max_evals / 600);
    auto q = integrate_adaptive_vec(outer, dim, -1.0, 1.0, budget.abs_tol, budget.rel_tol,
                                    outer_cap);
    const double inner_contrib = inner_calls ? 2.0 * inner_err_sum / static_cast<double>(inner_calls)
                                             : 0.0;
    return {std::move(q.value), q.error + inner_contrib, fiber_evals,
            q.converged && inner_converged};
}

// --- s2: pole (u,v), fiber in u with weight sin(u) -----------------------

RawResult raw_sphere2(const SpecLayout& L, const PrecisionBudget& budget) {
    const std::size_t dim = (1u << L.specs.size()) - 1;
    std::size_t fiber_evals = 0;
    auto integrand = [&](double v, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        ++fiber_evals;
        const double cv = std::cos(v), sv = std::sin(v);
        // f_c(u) = p1 cos u + q cos(u - offset)... reduced: p1 cos u + q sin u.
        std::array<double, kMaxConstituents> p1{}, qq{};
        std::array<double, kMaxConstituents> breaks{};
        std::size_t nb = 0;
        for (std::size_t c = 0; c < L.pts.size(); ++c) {
            const Vec3& p = L.pts[c].coords;
            p1[c] = p[0];
            qq[c] = p[1] * cv + p[2] * sv;
            const double R = std::hypot(p1[c], qq[c]);
            if (R > 1e-14) {
                // single zero of cos(u - chi) in (0, pi)
                double u = std::fmod(std::atan2(qq[c], p1[c]) + kPi / 2.0, kPi);
                if (u <= 0.0) u += kPi;
                if (u > 0.0 && u < kPi) breaks[nb++] = u;
            }
        }
        breaks[nb++] = kPi / 2.0;  // sign change of <y, o>
        std::sort(breaks.begin(), breaks.begin() + nb);
        auto bits = [&](double mid) {
            const double cu = std::cos(mid), su = std::sin(mid);
            unsigned pat = 0;
            for (std::size_t j = 0; j < L.specs.size(); ++j) {
                const auto& sp = L.specs[j];
                const auto member = [&](int c) {
                    const auto cc = static_cast<std::size_t>(c);
                    return (p1[cc] * cu + qq[cc] * su) * cu < 0.0;
                };
                bool b = member(sp.idx0);
                if (sp.idx1 >= 0) b ^= member(sp.idx1);
                if (b) pat |= 1u << j;
            }
            return pat;
        };
        auto mass = [](double a, double b) { return std::cos(a) - std::cos(b); };
        sweep_fiber(0.0, kPi, std::span<const double>(breaks.data(), nb), bits, mass, out);
    };
    auto q = integrate_adaptive_vec(integrand, dim, 0.0, kTwoPi, budget.abs_tol, budget.rel_tol,
                                    budget.max_evals);
    return {std::move(q.value), q.error, fiber_evals, q.converged};
}

// --- h2: geodesic (phi,psi), fiber in phi with weight sin(phi)^{-2} ------

RawResult raw_disc(const SpecLayout& L, const PrecisionBudget& budget) {
    const std::size_t dim = (1u << L.specs.size()) - 1;
    std::size_t fiber_evals = 0;
    auto integrand = [&](double psi, std::span<double> out) {
        std::fill(out.begin(), out.end(), 0.0);
        ++fiber_evals;
        const double cp = std::cos(psi), sp_ = std::sin(psi);
        // membership of z: cos(phi) < w_c, w_c = 2 Re(conj(z) e^{i psi}) / (1+|z|^2)
        std::array<double, kMaxConstituents> w{};
        std::array<double, kMaxConstituents> breaks{};
        std::size_t nb = 0;
        for (std::size_t c = 0; c < L.pts.size(); ++c) {
            const Vec3& p = L.pts[c].coords;
            const double zz = p[0] * p[0] + p[1] * p[1];
            w[c] = 2.0 * (p[0] * cp + p[1] * sp_) / (1.0 + zz);
            if (w[c] > 0.0 && w[c] < 1.0) {
                const double a = std::acos(w[c]);
                if (a > 0.0 && a < kPi / 2.0) breaks[nb++] = a;
            }
        }
        if (nb == 0) return;  // no membership anywhere on this psi-slice
        std::sort(breaks.begin(), breaks.begin() + nb);
        auto bits = [&](double mid) {
            const double cm = std::cos(mid);
            unsigned pat = 0;
            for (std::size_t j = 0; j < L.specs.size(); ++j) {
                const auto& sp2 = L.specs[j];
                bool b = cm < w[static_cast<std::size_t>(sp2.idx0)];
                if (sp2.idx1 >= 0) b ^= cm < w[static_cast<std::size_t>(sp2.idx1)];
                if (b) pat |= 1u << j;
            }
            return pat;
        };
        // integral of sin(phi)^{-2} over (a,b) = cot(a) - cot(b); the
        // pattern-zero interval below the first breakpoint never reaches
        // here, so the phi -> 0 divergence is excluded exactly.
        auto mass = [](double a, double b) { return 1.0 / std::tan(a) - 1.0 / std::tan(b); };
        sweep_fiber(0.0, kPi / 2.0, std::span<const double>(breaks.data(), nb), bits, mass, out);
    };
    auto q = integrate_adaptive_vec(integrand, dim, 0.0, kTwoPi, budget.abs_tol, budget.rel_tol,
                                    budget.max_evals);
    return {std::move(q.value), q.error, fiber_evals, q.converged};
}

// --- box family: exact coordinate grid -----------------------------------

RawResult raw_box(const SpecLayout& L, int n) {
    const std::size_t dim = (1u << L.specs.size()) - 1;
    RawResult res;
    res.mass.assign(dim, 0.0);
    std::array<std::vector<double>, 3> axis;
    for (int i = 0; i < n; ++i) {
        axis[static_cast<std::size_t>(i)].push_back(0.0);
        for (const auto& p : L.pts) {
            const double t = p.coords[static_cast<std::size_t>(i)];
            if (t > 0.0) axis[static_cast<std::size_t>(i)].push_back(t);
        }
        auto& a = axis[static_cast<std::size_t>(i)];
        std::sort(a.begin(), a.end());
        a.erase(std::unique(a.begin(), a.end()), a.end());
    }
    std::array<std::size_t, 3> idx{0, 0, 0};
    std::array<std::size_t, 3> count{1, 1, 1};
    for (int i = 0; i < n; ++i)
        count[static_cast<std::size_t>(i)] = axis[static_cast<std::size_t>(i)].size() - 1;
    for (int i = 0; i < n; ++i)
        if (count[static_cast<std::size_t>(i)] == 0) return res;  // all corners at 0

    while (true) {
        double vol = 1.0;
        Vec3 mid{0.5, 0.5, 0.5};  // unused coordinates sit inside (0,1), harmless
        for (int i = 0; i < n; ++i) {
            const auto& a = axis[static_cast<std::size_t>(i)];
            const double lo = a[idx[static_cast<std::size_t>(i)]];
            const double hi = a[idx[static_cast<std::size_t>(i)] + 1];
            vol *= hi - lo;
            mid[static_cast<std::size_t>(i)] = 0.5 * (lo + hi);
        }
        auto inside = [&](int c) {
            const Vec3& t = L.pts[static_cast<std::size_t>(c)].coords;
            for (int i = 0; i < n; ++i)
                if (!(mid[static_cast<std::size_t>(i)] < t[static_cast<std::size_t>(i)]))
                    return false;
            return true;
        };
        unsigned pat = 0;
        for (std::size_t j = 0; j < L.specs.size(); ++j) {
            const auto& sp = L.specs[j];
            bool b = inside(sp.idx0);
            if (sp.idx1 >= 0) b ^= inside(sp.idx1);
            if (b) pat |= 1u << j;
        }
        if (pat != 0) res.mass[pat - 1] += vol;
        ++res.evals;

        int i = 0;
        for (; i < n; ++i) {
            auto& k = idx[static_cast<std::size_t>(i)];
            if (++k < count[static_cast<std::size_t>(i)]) break;
            k = 0;
        }
        if (i == n) break;
    }
    return res;
}

RawResult raw_cells(const SpecLayout& L, const SetFamily& family, const PrecisionBudget& budget) {
    if (family.tag == SetFamily::Tag::Box) return raw_box(L, family.box_dim());
    switch (family.space) {
        case SpaceKind::Euclidean1: return raw_euclidean1(L);
        case SpaceKind::Euclidean2: return raw_euclidean2(L, budget);
        case SpaceKind::Euclidean3: return raw_euclidean3(L, budget);
        case SpaceKind::Sphere2: return raw_sphere2(L, budget);
        case SpaceKind::HyperbolicDisc: return raw_disc(L, budget);
    }
    throw std::logic_error("raw_cells: bad family");
}

bool family_is_exact(const SetFamily& family) {
    return family.tag == SetFamily::Tag::Box || family.space == SpaceKind::Euclidean1;
}

void check_point_for_family(const SpacePoint& p, const SetFamily& family) {
    p.validate();
    require(p.kind == family.space, "point kind does not match family");
    if (family.tag == SetFamily::Tag::Box) {
        for (int i = 0; i < family.box_dim(); ++i)
            require(p.coords[static_cast<std::size_t>(i)] >= 0.0,
                    "box corners need nonnegative coordinates");
    }
}

CellMeasureTable table_from_specs(const std::vector<MemberSpec>& specs, const SetFamily& family,
                                  const PrecisionBudget& budget) {
    const int d = static_cast<int>(specs.size());
    require(d >= 1 && d <= 8, "number of index points must be 1..8");
    const SpecLayout L(specs);
    RawResult raw = raw_cells(L, family, budget);
    const double kappa =
        family.tag == SetFamily::Tag::Box ? 1.0 : calibrate_normalization(family.space);
    CellMeasureTable t;
    t.d = d;
    t.mass.assign(1u << d, 0.0);
    for (std::size_t i = 0; i < raw.mass.size(); ++i) t.mass[i + 1] = kappa * raw.mass[i];
    t.method = family_is_exact(family) ? CellMethod::Exact : CellMethod::Quadrature;
    t.err = kappa * raw.err;
    t.converged = raw.converged;
    t.validate();
    return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// Calibration
// ---------------------------------------------------------------------------

namespace {

double raw_single_mass(const SpacePoint& x, const SetFamily& family, const PrecisionBudget& b) {
    const SpecLayout L({MemberSpec{x, SpacePoint::origin(family.space)}});
    return raw_cells(L, family, b).mass[0];
}

double calibrate_kind(SpaceKind kind) {
    const SetFamily family = SetFamily::separating(kind);
    const SpacePoint o = SpacePoint::origin(kind);
    SpacePoint probe, cross;
    switch (kind) {
        case SpaceKind::Euclidean1:
            probe = SpacePoint::r1(1.0);
            cross = SpacePoint::r1(-2.5);
            break;
        case SpaceKind::Euclidean2:
            probe = SpacePoint::r2(1.0, 0.0);
            cross = SpacePoint::r2(0.7, -0.3);
            break;
        case SpaceKind::Euclidean3:
            probe = SpacePoint::r3(1.0, 0.0, 0.0);
            cross = SpacePoint::r3(0.3, 0.5, -0.2);
            break;
        case SpaceKind::Sphere2:
            probe = SpacePoint::sphere({std::cos(1.0), std::sin(1.0), 0.0});
            cross = SpacePoint::sphere({std::cos(2.2), 0.0, std::sin(2.2)});
            break;
        case SpaceKind::HyperbolicDisc:
            probe = SpacePoint::disc({0.5, 0.0});
            cross = SpacePoint::disc({0.2, 0.6});
            break;
    }
    PrecisionBudget tight;
    tight.abs_tol = (kind == SpaceKind::Euclidean3) ? 1e-8 : 1e-9;
    tight.rel_tol = 1e-9;
    tight.max_evals = 8'000'000;
    const double raw_probe = raw_single_mass(probe, family, tight);
    if (!(raw_probe > 0.0)) throw std::runtime_error("calibration probe mass not positive");
    const double kappa = distance(probe, o) / raw_probe;
    const double got = kappa * raw_single_mass(cross, family, tight);
    const double want = distance(cross, o);
    if (std::abs(got - want) > 1e-3 * want)
        throw std::runtime_error("calibration cross-check failed for " + space_name(kind));
    return kappa;
}

}  // namespace

double calibrate_normalization(SpaceKind kind) {
    static std::mutex mu;
    static std::array<std::optional<double>, 5> cache;
    const auto slot = static_cast<std::size_t>(kind);
    std::lock_guard<std::mutex> lock(mu);
    if (!cache[slot]) cache[slot] = calibrate_kind(kind);
    return *cache[slot];
}

// ---------------------------------------------------------------------------
// Public table builders
// ---------------------------------------------------------------------------

CellMeasureTable increment_cell_measures(const std::vector<SpacePoint>& points,
                                         const GroupElement& g, const SetFamily& family,
                                         const PrecisionBudget& budget) {
    require(!points.empty(), "need at least one index point");
    if (family.tag == SetFamily::Tag::Box) {
        // The box family carries no isometry group; only the trivial element
        // is meaningful, and it reduces to plain cell measures.
        const GroupElement id = GroupElement::identity(family.space);
        require(g.kind == family.space && g.shift == id.shift && g.rot.m == id.rot.m,
                "box family supports only the identity group element");
    } else {
        require(g.kind == family.space, "group element kind does not match family");
        g.validate();
    }
    const bool is_box = family.tag == SetFamily::Tag::Box;
    auto moved = [&](const SpacePoint& p) { return is_box ? p : apply_group(g, p); };
    const SpacePoint go = moved(SpacePoint::origin(family.space));
    std::vector<MemberSpec> specs;
    specs.reserve(points.size());
    for (const auto& p : points) {
        check_point_for_family(p, family);
        const SpacePoint gp = moved(p);
        check_point_for_family(gp, family);
        specs.push_back(MemberSpec{gp, go});
    }
    return table_from_specs(specs, family, budget);
}

CellMeasureTable cell_measures(const std::vector<SpacePoint>& points, const SetFamily& family,
                               const PrecisionBudget& budget) {
    return increment_cell_measures(points, GroupElement::identity(family.space), family, budget);
}

double symmdiff_measure(const SpacePoint& x, const SpacePoint& y, const SetFamily& family,
                        const PrecisionBudget& budget) {
    return pair_symmdiff_table(x, y, family, budget).mass_of(1);
}

CellMeasureTable pair_symmdiff_table(const SpacePoint& x, const SpacePoint& y,
                                     const SetFamily& family, const PrecisionBudget& budget) {
    check_point_for_family(x, family);
    check_point_for_family(y, family);
    return table_from_specs({MemberSpec{x, y}}, family, budget);
}

}  // namespace stablefield

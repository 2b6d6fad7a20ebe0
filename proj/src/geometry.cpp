#include "stablefield/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace stablefield {

namespace {

bool finite(const Vec3& v) {
    return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

void require(bool cond, const char* msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

int space_dim(SpaceKind kind) {
    switch (kind) {
        case SpaceKind::Euclidean1: return 1;
        case SpaceKind::Euclidean2: return 2;
        case SpaceKind::Euclidean3: return 3;
        case SpaceKind::Sphere2: return 3;  // ambient coordinates
        case SpaceKind::HyperbolicDisc: return 2;
    }
    throw std::logic_error("space_dim: bad kind");
}

std::string space_name(SpaceKind kind) {
    switch (kind) {
        case SpaceKind::Euclidean1: return "r1";
        case SpaceKind::Euclidean2: return "r2";
        case SpaceKind::Euclidean3: return "r3";
        case SpaceKind::Sphere2: return "s2";
        case SpaceKind::HyperbolicDisc: return "h2";
    }
    throw std::logic_error("space_name: bad kind");
}

SpaceKind space_from_name(const std::string& s) {
    if (s == "r1") return SpaceKind::Euclidean1;
    if (s == "r2") return SpaceKind::Euclidean2;
    if (s == "r3") return SpaceKind::Euclidean3;
    if (s == "s2") return SpaceKind::Sphere2;
    if (s == "h2") return SpaceKind::HyperbolicDisc;
    throw std::invalid_argument("unknown space name: " + s);
}

SpacePoint SpacePoint::origin(SpaceKind kind) {
    if (kind == SpaceKind::Sphere2) return sphere({1, 0, 0});
    return {kind, {0, 0, 0}};
}

void SpacePoint::validate() const {
    require(finite(coords), "point coordinates must be finite");
    const int n = space_dim(kind);
    for (int i = n; i < 3; ++i) require(coords[i] == 0.0, "unused point coordinates must be 0");
    if (kind == SpaceKind::Sphere2)
        require(std::abs(norm(coords) - 1.0) <= 1e-9, "sphere point must be a unit vector");
    if (kind == SpaceKind::HyperbolicDisc)
        require(std::abs(z()) < 1.0 - 1e-9, "disc point too close to the boundary");
}

double distance(const SpacePoint& a, const SpacePoint& b) {
    require(a.kind == b.kind, "distance: mismatched spaces");
    switch (a.kind) {
        case SpaceKind::Euclidean1:
        case SpaceKind::Euclidean2:
        case SpaceKind::Euclidean3:
            return norm(a.coords - b.coords);
        case SpaceKind::Sphere2: {
            // atan2 form stays accurate near 0 and pi where acos(dot) loses
            // ~sqrt(eps); identical inputs give exactly 0.
            const Vec3 x = cross(a.coords, b.coords);
            return std::atan2(norm(x), dot(a.coords, b.coords));
        }
        case SpaceKind::HyperbolicDisc: {
            const std::complex<double> za = a.z(), zb = b.z();
            const double num = std::abs(1.0 - std::conj(za) * zb);
            const double dif = std::abs(za - zb);
            // 0.5 log((num+dif)/(num-dif)) = artanh(dif/num), stably via log1p.
            return 0.5 * std::log1p(2.0 * dif / (num - dif));
        }
    }
    throw std::logic_error("distance: bad kind");
}

GroupElement GroupElement::identity(SpaceKind kind) {
    GroupElement g;
    g.kind = kind;
    return g;
}

void GroupElement::validate() const {
    switch (kind) {
        case SpaceKind::Euclidean1:
        case SpaceKind::Euclidean2:
        case SpaceKind::Euclidean3: {
            const int n = space_dim(kind);
            require(finite(shift), "group shift must be finite");
            for (int i = n; i < 3; ++i) require(shift[i] == 0.0, "unused shift entries must be 0");
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    const double expect = (i == j) ? 1.0 : 0.0;
                    if (i >= n || j >= n)
                        require(rot.m[i][j] == expect, "orthogonal block exceeds space dimension");
                }
            // orthogonality of the leading n x n block
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) {
                    double s = 0;
                    for (int k = 0; k < n; ++k) s += rot.m[k][i] * rot.m[k][j];
                    require(std::abs(s - (i == j ? 1.0 : 0.0)) <= 1e-9, "rotation block not orthogonal");
                }
            break;
        }
        case SpaceKind::Sphere2: {
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) {
                    double s = 0;
                    for (int k = 0; k < 3; ++k) s += rot.m[k][i] * rot.m[k][j];
                    require(std::abs(s - (i == j ? 1.0 : 0.0)) <= 1e-9, "rotation not orthogonal");
                }
            require(rot.det() > 0.0, "sphere isometry must be a proper rotation");
            break;
        }
        case SpaceKind::HyperbolicDisc: {
            const double q = std::norm(mob_a) - std::norm(mob_b);
            require(std::abs(q - 1.0) <= 1e-9, "Mobius coefficients must satisfy |a|^2-|b|^2=1");
            break;
        }
    }
}

SpacePoint apply_group(const GroupElement& g, const SpacePoint& x) {
    require(g.kind == x.kind, "apply_group: mismatched spaces");
    switch (g.kind) {
        case SpaceKind::Euclidean1:
        case SpaceKind::Euclidean2:
        case SpaceKind::Euclidean3:
            return {g.kind, g.rot.apply(x.coords) + g.shift};
        case SpaceKind::Sphere2:
            return {g.kind, g.rot.apply(x.coords)};
        case SpaceKind::HyperbolicDisc: {
            const std::complex<double> z = x.z();
            const std::complex<double> w =
                (g.mob_a * z + g.mob_b) / (std::conj(g.mob_b) * z + std::conj(g.mob_a));
            return SpacePoint::disc(w);
        }
    }
    throw std::logic_error("apply_group: bad kind");
}

GroupElement compose(const GroupElement& g, const GroupElement& h) {
    require(g.kind == h.kind, "compose: mismatched spaces");
    GroupElement r;
    r.kind = g.kind;
    switch (g.kind) {
        case SpaceKind::Euclidean1:
        case SpaceKind::Euclidean2:
        case SpaceKind::Euclidean3:
            r.rot = g.rot.mul(h.rot);
            r.shift = g.rot.apply(h.shift) + g.shift;
            break;
        case SpaceKind::Sphere2:
            r.rot = g.rot.mul(h.rot);
            break;
        case SpaceKind::HyperbolicDisc:
            r.mob_a = g.mob_a * h.mob_a + g.mob_b * std::conj(h.mob_b);
            r.mob_b = g.mob_a * h.mob_b + g.mob_b * std::conj(h.mob_a);
            break;
    }
    return r;
}

namespace {

// Gram-Schmidt on Gaussian columns; leading n x n block, rest identity.
Mat3 random_orthogonal(int n, Rng& rng, bool force_proper) {
    Mat3 q = Mat3::identity();
    while (true) {
        double cols[3][3];
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) cols[j][i] = rng.normal();
            for (int k = 0; k < j; ++k) {
                double s = 0;
                for (int i = 0; i < n; ++i) s += cols[j][i] * cols[k][i];
                for (int i = 0; i < n; ++i) cols[j][i] -= s * cols[k][i];
            }
            double len = 0;
            for (int i = 0; i < n; ++i) len += cols[j][i] * cols[j][i];
            len = std::sqrt(len);
            if (len < 1e-6) goto retry;  // near-degenerate draw, resample
            for (int i = 0; i < n; ++i) cols[j][i] /= len;
        }
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) q.m[i][j] = cols[j][i];
        if (force_proper && q.det() < 0.0)
            for (int i = 0; i < n; ++i) q.m[i][0] = -q.m[i][0];
        return q;
    retry:;
    }
}

}  // namespace

GroupElement random_group_element(SpaceKind kind, Rng& rng) {
    GroupElement g;
    g.kind = kind;
    switch (kind) {
        case SpaceKind::Euclidean1:
            g.rot.m[0][0] = rng.bernoulli(0.5) ? 1.0 : -1.0;
            g.shift[0] = 1.5 * rng.normal();
            break;
        case SpaceKind::Euclidean2:
        case SpaceKind::Euclidean3: {
            const int n = space_dim(kind);
            g.rot = random_orthogonal(n, rng, false);
            for (int i = 0; i < n; ++i) g.shift[i] = 1.5 * rng.normal();
            break;
        }
        case SpaceKind::Sphere2:
            g.rot = random_orthogonal(3, rng, true);
            break;
        case SpaceKind::HyperbolicDisc: {
            // rotation * boost: a = e^{i theta} cosh t, b = e^{i(theta+chi)} sinh t
            const double theta = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const double chi = rng.uniform(0.0, 2.0 * std::numbers::pi);
            const double t = 0.8 * std::abs(rng.normal());
            g.mob_a = std::polar(std::cosh(t), theta);
            g.mob_b = std::polar(std::sinh(t), theta + chi);
            break;
        }
    }
    return g;
}

SpacePoint random_point(SpaceKind kind, Rng& rng) {
    switch (kind) {
        case SpaceKind::Euclidean1: return SpacePoint::r1(rng.normal());
        case SpaceKind::Euclidean2: return SpacePoint::r2(rng.normal(), rng.normal());
        case SpaceKind::Euclidean3:
            return SpacePoint::r3(rng.normal(), rng.normal(), rng.normal());
        case SpaceKind::Sphere2: {
            while (true) {
                Vec3 v{rng.normal(), rng.normal(), rng.normal()};
                const double len = norm(v);
                if (len > 1e-6) return SpacePoint::sphere((1.0 / len) * v);
            }
        }
        case SpaceKind::HyperbolicDisc: {
            while (true) {
                const double x = rng.uniform(-1.0, 1.0), y = rng.uniform(-1.0, 1.0);
                const double r2 = x * x + y * y;
                if (r2 < 0.95 * 0.95) return SpacePoint::disc({x, y});
            }
        }
    }
    throw std::logic_error("random_point: bad kind");
}

}  // namespace stablefield

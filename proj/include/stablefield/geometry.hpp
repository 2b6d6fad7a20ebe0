#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "stablefield/rng.hpp"

namespace stablefield {

// ---------------------------------------------------------------------------
// Small dense linear algebra, enough for rigid motions and rotations.
// ---------------------------------------------------------------------------

using Vec3 = std::array<double, 3>;

inline double dot(const Vec3& a, const Vec3& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}
inline double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
inline Vec3 operator+(const Vec3& a, const Vec3& b) {
    return {a[0] + b[0], a[1] + b[1], a[2] + b[2]};
}
inline Vec3 operator-(const Vec3& a, const Vec3& b) {
    return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}
inline Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

struct Mat3 {
    // row-major
    std::array<std::array<double, 3>, 3> m{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};

    static Mat3 identity() { return {}; }
    Vec3 apply(const Vec3& v) const {
        return {m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
                m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
                m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2]};
    }
    Mat3 mul(const Mat3& o) const {
        Mat3 r;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) {
                double s = 0;
                for (int k = 0; k < 3; ++k) s += m[i][k] * o.m[k][j];
                r.m[i][j] = s;
            }
        return r;
    }
    double det() const {
        return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
               m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
               m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    }
};

// ---------------------------------------------------------------------------
// Spaces and points
// ---------------------------------------------------------------------------

// The supported base spaces. Euclidean spaces carry their dimension in the
// kind so that point validation and serialization stay unambiguous.
enum class SpaceKind { Euclidean1, Euclidean2, Euclidean3, Sphere2, HyperbolicDisc };

// Spatial dimension of the chart coordinates (h2 uses 2: Re z, Im z).
int space_dim(SpaceKind kind);
std::string space_name(SpaceKind kind);           // "r1", "r2", "r3", "s2", "h2"
SpaceKind space_from_name(const std::string& s);  // throws on unknown name

struct SpacePoint {
    SpaceKind kind = SpaceKind::Euclidean1;
    Vec3 coords{0, 0, 0};  // r*: first n entries; s2: unit vector; h2: (Re z, Im z, 0)

    static SpacePoint r1(double x) { return {SpaceKind::Euclidean1, {x, 0, 0}}; }
    static SpacePoint r2(double x, double y) { return {SpaceKind::Euclidean2, {x, y, 0}}; }
    static SpacePoint r3(double x, double y, double z) { return {SpaceKind::Euclidean3, {x, y, z}}; }
    static SpacePoint sphere(const Vec3& v) { return {SpaceKind::Sphere2, v}; }
    static SpacePoint disc(std::complex<double> z) {
        return {SpaceKind::HyperbolicDisc, {z.real(), z.imag(), 0}};
    }
    static SpacePoint origin(SpaceKind kind);

    std::complex<double> z() const { return {coords[0], coords[1]}; }

    // Throws std::invalid_argument on malformed coordinates
    // (non-unit sphere vector, |z| >= 1, non-finite entries).
    void validate() const;
};

// Geodesic distance to the base point convention of each space:
//   r*: Euclidean norm; s2: arccos of the clamped inner product;
//   h2: d(z,w) = (1/2) log[(|1 - conj(z) w| + |z - w|) / (|1 - conj(z) w| - |z - w|)],
//       the Poincare metric normalized so d(0,t) = artanh(t).
double distance(const SpacePoint& a, const SpacePoint& b);

// ---------------------------------------------------------------------------
// Isometry groups: E(n) for r*, O(3) restricted to SO(3) for s2,
// SU(1,1) Mobius maps z -> (a z + b) / (conj(b) z + conj(a)) for h2.
// ---------------------------------------------------------------------------

struct GroupElement {
    SpaceKind kind = SpaceKind::Euclidean1;
    Mat3 rot = Mat3::identity();        // r*: orthogonal block; s2: rotation
    Vec3 shift{0, 0, 0};                // r*: translation
    std::complex<double> mob_a{1, 0};   // h2: |a|^2 - |b|^2 = 1
    std::complex<double> mob_b{0, 0};

    static GroupElement identity(SpaceKind kind);
    void validate() const;  // orthogonality / determinant / unit-norm checks
};

SpacePoint apply_group(const GroupElement& g, const SpacePoint& x);

// Composition g . h  (apply h first, then g).
GroupElement compose(const GroupElement& g, const GroupElement& h);

// Haar-ish random elements with moderate translation/boost magnitudes,
// suitable for invariance testing. Euclidean elements may reflect;
// sphere elements are proper rotations.
GroupElement random_group_element(SpaceKind kind, Rng& rng);

// Random test points: r* standard normal coordinates; s2 uniform on the
// sphere; h2 uniform in the disc of radius 0.95 (points with |z| > 1 - 1e-9
// are rejected regardless).
SpacePoint random_point(SpaceKind kind, Rng& rng);

}  // namespace stablefield

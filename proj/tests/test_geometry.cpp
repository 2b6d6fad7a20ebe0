#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "doctest.h"
#include "stablefield/geometry.hpp"
#include "stablefield/io.hpp"
#include "stablefield/rng.hpp"

using namespace stablefield;

namespace {
const SpaceKind kAllSpaces[] = {SpaceKind::Euclidean1, SpaceKind::Euclidean2,
                                SpaceKind::Euclidean3, SpaceKind::Sphere2,
                                SpaceKind::HyperbolicDisc};
}

TEST_SUITE("geometry") {

TEST_CASE("space names and dimensions") {
    CHECK(space_dim(SpaceKind::Euclidean1) == 1);
    CHECK(space_dim(SpaceKind::Euclidean2) == 2);
    CHECK(space_dim(SpaceKind::Euclidean3) == 3);
    CHECK(space_dim(SpaceKind::Sphere2) == 3);
    CHECK(space_dim(SpaceKind::HyperbolicDisc) == 2);
    for (SpaceKind k : kAllSpaces) CHECK(space_from_name(space_name(k)) == k);
    CHECK_THROWS_AS(space_from_name("r4"), std::invalid_argument);
}

TEST_CASE("euclidean distances") {
    CHECK(distance(SpacePoint::r1(1.0), SpacePoint::r1(-0.5)) == doctest::Approx(1.5));
    CHECK(distance(SpacePoint::r2(1, 0), SpacePoint::r2(0, 1)) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(distance(SpacePoint::r3(1, 2, 2), SpacePoint::r3(0, 0, 0)) == doctest::Approx(3.0));
}

TEST_CASE("sphere distance is the central angle") {
    const auto x = SpacePoint::sphere({1, 0, 0});
    const auto y = SpacePoint::sphere({0, 1, 0});
    CHECK(distance(x, y) == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
    CHECK(distance(x, SpacePoint::sphere({-1, 0, 0})) ==
          doctest::Approx(std::numbers::pi).epsilon(1e-15));
    CHECK(distance(x, x) == 0.0);
}

TEST_CASE("disc distance from the centre is artanh") {
    const auto o = SpacePoint::origin(SpaceKind::HyperbolicDisc);
    for (double t : {0.1, 0.5, 0.9, 0.99}) {
        CHECK(distance(o, SpacePoint::disc({t, 0.0})) ==
              doctest::Approx(std::atanh(t)).epsilon(1e-12));
        // rotation about the centre does not change it
        CHECK(distance(o, SpacePoint::disc(std::polar(t, 2.1))) ==
              doctest::Approx(std::atanh(t)).epsilon(1e-12));
    }
}

TEST_CASE("origin conventions") {
    CHECK(SpacePoint::origin(SpaceKind::Euclidean2).coords == Vec3{0, 0, 0});
    CHECK(SpacePoint::origin(SpaceKind::Sphere2).coords == Vec3{1, 0, 0});
    CHECK(SpacePoint::origin(SpaceKind::HyperbolicDisc).z() == std::complex<double>(0, 0));
}

TEST_CASE("point validation rejects malformed coordinates") {
    CHECK_THROWS_AS(SpacePoint::sphere({1, 1, 0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(SpacePoint::disc({1.0, 0.0}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(SpacePoint::disc({0.8, 0.7}).validate(), std::invalid_argument);
    CHECK_THROWS_AS(SpacePoint::r1(std::nan("")).validate(), std::invalid_argument);
    CHECK_NOTHROW(SpacePoint::sphere({0, 0, 1}).validate());
    CHECK_NOTHROW(SpacePoint::disc({0.3, -0.4}).validate());
}

TEST_CASE("random points are valid and cover their space") {
    Rng rng(2024);
    for (SpaceKind k : kAllSpaces) {
        for (int i = 0; i < 200; ++i) {
            const SpacePoint p = random_point(k, rng);
            CHECK_NOTHROW(p.validate());
            CHECK(std::isfinite(distance(p, SpacePoint::origin(k))));
        }
    }
}

TEST_CASE("group elements preserve distance") {
    Rng rng(7);
    for (SpaceKind k : kAllSpaces) {
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const GroupElement g = random_group_element(k, rng);
            const SpacePoint x = random_point(k, rng);
            const SpacePoint y = random_point(k, rng);
            const double before = distance(x, y);
            const double after = distance(apply_group(g, x), apply_group(g, y));
            worst = std::max(worst, std::abs(after - before));
        }
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("composition equals sequential application") {
    Rng rng(11);
    for (SpaceKind k : kAllSpaces) {
        for (int i = 0; i < 200; ++i) {
            const GroupElement g = random_group_element(k, rng);
            const GroupElement h = random_group_element(k, rng);
            const GroupElement gh = compose(g, h);
            CHECK_NOTHROW(gh.validate());
            const SpacePoint x = random_point(k, rng);
            const SpacePoint a = apply_group(gh, x);
            const SpacePoint b = apply_group(g, apply_group(h, x));
            CHECK(distance(a, b) < 1e-9);
        }
    }
}

TEST_CASE("identity fixes every point") {
    Rng rng(3);
    for (SpaceKind k : kAllSpaces) {
        const GroupElement e = GroupElement::identity(k);
        CHECK_NOTHROW(e.validate());
        const SpacePoint x = random_point(k, rng);
        CHECK(distance(apply_group(e, x), x) < 1e-12);
    }
}

TEST_CASE("hyperbolic boost moves the centre to tanh of the rapidity") {
    GroupElement g;
    g.kind = SpaceKind::HyperbolicDisc;
    g.mob_a = {std::cosh(1.0), 0.0};
    g.mob_b = {std::sinh(1.0), 0.0};
    CHECK_NOTHROW(g.validate());
    const SpacePoint img = apply_group(g, SpacePoint::origin(SpaceKind::HyperbolicDisc));
    CHECK(img.z().real() == doctest::Approx(std::tanh(1.0)).epsilon(1e-14));
    CHECK(img.z().imag() == doctest::Approx(0.0));
    // and the displacement distance is exactly the rapidity
    CHECK(distance(SpacePoint::origin(SpaceKind::HyperbolicDisc), img) ==
          doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("group validation catches broken elements") {
    GroupElement g = GroupElement::identity(SpaceKind::Euclidean2);
    g.rot.m[0][0] = 2.0;  // not orthogonal
    CHECK_THROWS_AS(g.validate(), std::invalid_argument);

    GroupElement m = GroupElement::identity(SpaceKind::HyperbolicDisc);
    m.mob_a = {1.0, 0.0};
    m.mob_b = {1.0, 0.0};  // |a|^2 - |b|^2 = 0
    CHECK_THROWS_AS(m.validate(), std::invalid_argument);
}

TEST_CASE("point json round trip") {
    Rng rng(99);
    for (SpaceKind k : kAllSpaces) {
        const SpacePoint p = random_point(k, rng);
        const SpacePoint q = point_from_json(point_to_json(p));
        CHECK(q.kind == p.kind);
        CHECK(distance(p, q) < 1e-8);  // 9-digit serialization
    }
    CHECK_THROWS_AS(point_from_json(nlohmann::json{{"kind", "s2"}, {"coords", {2, 0, 0}}}),
                    std::invalid_argument);
}

TEST_CASE("group json round trip") {
    Rng rng(17);
    for (SpaceKind k : kAllSpaces) {
        const GroupElement g = random_group_element(k, rng);
        const GroupElement h = group_from_json(group_to_json(g));
        CHECK(h.kind == g.kind);
        const SpacePoint x = random_point(k, rng);
        CHECK(distance(apply_group(g, x), apply_group(h, x)) < 1e-7);
    }
}

}  // TEST_SUITE

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dislocore/geometry.hpp"
#include "oracles.hpp"

using namespace dislocore;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("contains: open-set membership") {
    const Domain disk = Domain::unit_disk();
    CHECK(disk.contains({0.0, 0.0}));
    CHECK_FALSE(disk.contains({1.0, 0.0})); // boundary point not in the open set
    CHECK(disk.contains({0.3, 0.4}));
    CHECK_FALSE(disk.contains({2.0, 0.0}));

    const Domain ell = Domain::ellipse(2.0, 1.0);
    CHECK(ell.contains({1.9, 0.0}));
    CHECK(ell.contains({0.0, 0.9}));
    CHECK_FALSE(ell.contains({0.0, 1.1}));
    CHECK_FALSE(ell.contains({2.1, 0.0}));
}

TEST_CASE("nearest_boundary: radial projections on disks") {
    const Domain disk = Domain::unit_disk();
    const auto p = disk.nearest_boundary({0.9, 0.0});
    CHECK(p.distance == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(p.point.position.x == doctest::Approx(1.0));
    CHECK(p.point.position.y == doctest::Approx(0.0));
    CHECK(p.point.outward_normal.x == doctest::Approx(1.0));
    CHECK_FALSE(p.ambiguous);

    const auto c = disk.nearest_boundary({0.0, 0.0});
    CHECK(c.distance == doctest::Approx(1.0));
    CHECK(c.ambiguous); // full symmetry; deterministic representative
    CHECK(c.point.arc_parameter == doctest::Approx(0.0));

    const Domain big = Domain::disk({1.0, 1.0}, 2.0);
    const auto q = big.nearest_boundary({1.0, 2.5});
    CHECK(q.distance == doctest::Approx(0.5));
    CHECK(q.point.position.x == doctest::Approx(1.0));
    CHECK(q.point.position.y == doctest::Approx(3.0));
    CHECK(q.point.outward_normal.y == doctest::Approx(1.0));

    CHECK_THROWS_AS((void)disk.nearest_boundary({2.0, 0.0}), OutsideDomain);
}

TEST_CASE("nearest_boundary: Newton projection on a smooth curve") {
    const Domain ell = Domain::ellipse(2.0, 1.0);
    oracles::Rng rng{11};
    for (int k = 0; k < 40; ++k) {
        const Vec2 p{rng.uniform(-1.4, 1.4), rng.uniform(-0.7, 0.7)};
        if (!ell.contains(p)) continue;
        const auto proj = ell.nearest_boundary(p);
        // reconstruction p = s - d nu(s)
        const Vec2 rec = proj.point.position - proj.distance * proj.point.outward_normal;
        CHECK(dist(rec, p) < 1e-9);
        CHECK(std::abs(proj.point.outward_normal.norm() - 1.0) < 1e-12);
        CHECK(std::abs(proj.point.tangent.norm() - 1.0) < 1e-12);
        CHECK(std::abs(proj.point.outward_normal.dot(proj.point.tangent)) < 1e-12);
    }
}

TEST_CASE("uniform_disk_radius") {
    CHECK(Domain::unit_disk().uniform_disk_radius() == 1.0);
    CHECK(Domain::disk({0, 0}, 2.0).uniform_disk_radius() == 2.0);
    // ellipse: minimal radius of curvature from the curvature-formula oracle
    const double expected = oracles::ellipse_min_curvature_radius(2.0, 1.0);
    CHECK(expected == doctest::Approx(0.5).epsilon(1e-6));
    const Domain ell = Domain::ellipse(2.0, 1.0, 256);
    CHECK(ell.uniform_disk_radius() == doctest::Approx(expected).epsilon(5e-3));
}

TEST_CASE("boundary point fields on the ellipse") {
    const Domain ell = Domain::ellipse(2.0, 1.0);
    const BoundaryPoint bp = ell.boundary_point(0.0);
    CHECK(bp.position.x == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(bp.outward_normal.x == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(bp.curvature == doctest::Approx(2.0).epsilon(1e-8)); // a/b^2
    const BoundaryPoint top = ell.boundary_point(kPi / 2.0);
    CHECK(top.curvature == doctest::Approx(0.25).epsilon(1e-8)); // b/a^2

    // arc length of the full ellipse perimeter (reference value)
    CHECK(ell.perimeter() == doctest::Approx(9.688448).epsilon(1e-5));
    // param_from_arc inverts arc_length
    for (double t : {0.3, 1.7, 3.1, 5.9})
        CHECK(ell.param_from_arc(ell.arc_length(t)) == doctest::Approx(t).epsilon(1e-10));
}

TEST_CASE("radial_extent hits the boundary") {
    const Domain disk = Domain::disk({1.0, -0.5}, 1.5);
    const Vec2 p{1.2, -0.3};
    for (double phi : {0.0, 0.7, 2.0, 4.4}) {
        const double r = disk.radial_extent(p, phi);
        const Vec2 hit = p + r * Vec2{std::cos(phi), std::sin(phi)};
        CHECK(std::abs(dist(hit, disk.center()) - disk.radius()) < 1e-12);
    }
    const Domain ell = Domain::ellipse(2.0, 1.0);
    const Vec2 q{0.4, 0.2};
    for (double phi : {0.1, 1.3, 2.9, 5.2}) {
        const double r = ell.radial_extent(q, phi);
        const Vec2 hit = q + r * Vec2{std::cos(phi), std::sin(phi)};
        CHECK(std::abs(ell.signed_boundary_distance(hit)) < 1e-9);
    }
}

TEST_CASE("separation") {
    const Domain disk = Domain::unit_disk();
    CHECK(separation({{0.9, 0.0}}, disk) == doctest::Approx(0.1));
    CHECK(separation({{0.5, 0.0}, {-0.5, 0.0}}, disk) == doctest::Approx(0.5));
    CHECK(separation({{0.1, 0.0}, {-0.1, 0.0}}, disk) == doctest::Approx(0.2));
    CHECK_THROWS_AS((void)separation({}, disk), EmptyConfiguration);

    // permutation symmetry
    oracles::Rng rng{3};
    for (int k = 0; k < 10; ++k) {
        std::vector<Vec2> z;
        for (int i = 0; i < 4; ++i) z.push_back(rng.in_disk(0.8));
        std::vector<Vec2> w = {z[2], z[0], z[3], z[1]};
        CHECK(separation(z, disk) == doctest::Approx(separation(w, disk)).epsilon(1e-14));
    }
}

TEST_CASE("region predicates D and C") {
    const Domain disk = Domain::unit_disk();
    CHECK(in_region_D(disk, {{0.97, 0.0}, {0.0, 0.2}}, 0.05, 0.5));
    CHECK_FALSE(in_region_D(disk, {{0.97, 0.0}, {0.0, 0.6}}, 0.05, 0.5));
    CHECK_FALSE(in_region_C(disk, {{0.05, 0.0}, {-0.05, 0.0}, {0.0, 0.0}}, 0.2, 0.3));
    CHECK(in_region_C(disk, {{0.05, 0.0}, {-0.05, 0.0}}, 0.2, 0.5));

    CHECK_THROWS_AS((void)in_region_D(disk, {{0.9, 0.0}}, 0.5, 0.5), ParameterOrder);
    CHECK_THROWS_AS((void)in_region_C(disk, {{0.0, 0.0}, {0.1, 0.0}}, 0.3, 0.2),
                    ParameterOrder);

    // monotonicity: delta' >= delta and gamma' <= gamma preserve membership
    oracles::Rng rng{17};
    for (int k = 0; k < 20; ++k) {
        const double frac = rng.uniform(0.9, 0.99);
        const std::vector<Vec2> z = {{frac, 0.0}, {rng.uniform(-0.2, 0.2), 0.1}};
        const double delta = 0.2, gamma = 0.6;
        if (in_region_D(disk, z, delta, gamma)) {
            CHECK(in_region_D(disk, z, 0.3, 0.5));
            CHECK(in_region_D(disk, z, 0.25, 0.55));
        }
    }
}

TEST_CASE("smooth curve validation") {
    // figure-eight ordering must be rejected
    std::vector<Vec2> bad;
    const int n = 64;
    for (int j = 0; j < n; ++j) {
        const double t = 2.0 * kPi * j / n;
        bad.push_back({std::sin(2.0 * t), std::sin(t)});
    }
    CHECK_THROWS_AS((void)Domain::smooth_curve(bad, false), DegenerateBoundary);
    CHECK_THROWS_AS((void)Domain::disk({0, 0}, -1.0), DegenerateBoundary);
    CHECK_THROWS_AS((void)Domain::ellipse(2.0, 1.0).radius(), Error);
}

TEST_CASE("curvature bound matches the uniform disk radius invariant") {
    const Domain ell = Domain::ellipse(1.5, 1.0, 256);
    double max_curv = 0.0;
    for (int j = 0; j < 512; ++j)
        max_curv = std::max(max_curv, std::abs(ell.boundary_point(2.0 * kPi * j / 512).curvature));
    CHECK(max_curv <= 1.0 / ell.uniform_disk_radius() + 1e-6);
}

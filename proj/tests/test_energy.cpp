#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "dislocore/energy.hpp"
#include "oracles.hpp"

using namespace dislocore;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

Configuration random_config(oracles::Rng& rng, int n, double radius, double min_sep) {
    Configuration cfg;
    while (cfg.size() < n) {
        const Vec2 z = rng.in_disk(radius);
        bool ok = true;
        for (const Vec2& w : cfg.positions)
            if (dist(z, w) < min_sep) ok = false;
        if (!ok) continue;
        cfg.positions.push_back(z);
        cfg.moduli.push_back(rng.sign());
    }
    return cfg;
}

} // namespace

TEST_CASE("renormalized energy: single dislocation closed forms") {
    const GreenEngine g = GreenEngine::image_form(Domain::unit_disk());
    CHECK(renormalized_energy({{{0.0, 0.0}}, {1}}, g) == doctest::Approx(0.0));
    CHECK(renormalized_energy({{{0.8, 0.0}}, {1}}, g) ==
          doctest::Approx(0.5 * std::log(0.36) / kTwoPi).epsilon(1e-13));
    // sign of the modulus does not change the self energy
    CHECK(renormalized_energy({{{0.8, 0.0}}, {-1}}, g) ==
          doctest::Approx(0.5 * std::log(0.36) / kTwoPi).epsilon(1e-13));
}

TEST_CASE("renormalized energy: permutation invariance and coincidence handling") {
    const GreenEngine g = GreenEngine::image_form(Domain::unit_disk());
    oracles::Rng rng{41};
    for (int k = 0; k < 10; ++k) {
        Configuration cfg = random_config(rng, 4, 0.8, 0.1);
        Configuration perm;
        for (int i : {2, 0, 3, 1}) {
            perm.positions.push_back(cfg.positions[i]);
            perm.moduli.push_back(cfg.moduli[i]);
        }
        CHECK(renormalized_energy(cfg, g) ==
              doctest::Approx(renormalized_energy(perm, g)).epsilon(1e-12));
    }

    const Configuration same{{{0.1, 0.0}, {0.1, 0.0}}, {1, 1}};
    CHECK(renormalized_energy(same, g) == std::numeric_limits<double>::infinity());
    const Configuration opp{{{0.1, 0.0}, {0.1, 0.0}}, {1, -1}};
    CHECK_THROWS_AS((void)renormalized_energy(opp, g), CoincidentDislocations);
}

TEST_CASE("peach-koehler force: closed forms") {
    const GreenEngine g = GreenEngine::image_form(Domain::unit_disk());
    const Vec2 f = peach_koehler({{{0.5, 0.0}}, {1}}, g, 0);
    CHECK(f.x == doctest::Approx(0.5 / (kTwoPi * 0.75)).epsilon(1e-12)); // 0.10610
    CHECK(f.y == doctest::Approx(0.0));
    CHECK(peach_koehler({{{0.0, 0.0}}, {1}}, g, 0).norm() < 1e-14);
}

TEST_CASE("peach-koehler force matches finite differences of the energy") {
    const GreenEngine g = GreenEngine::image_form(Domain::unit_disk());
    oracles::Rng rng{4242};
    int checked = 0;
    for (int k = 0; k < 50; ++k) {
        const int n = 1 + static_cast<int>(rng.next() % 4);
        Configuration cfg = random_config(rng, n, 0.8, 0.15);
        const auto forces = peach_koehler_all(cfg, g);
        for (int i = 0; i < n; ++i) {
            auto e_of = [&](Vec2 z) {
                Configuration c = cfg;
                c.positions[i] = z;
                return renormalized_energy(c, g);
            };
            const Vec2 fd = oracles::fd_grad(e_of, cfg.positions[i], 1e-6);
            const Vec2 f = forces[i];
            const double scale = std::max(1e-3, f.norm());
            CHECK((f + fd).norm() / scale < 1e-5); // f = -grad E
            ++checked;
        }
    }
    CHECK(checked >= 50);
}

TEST_CASE("sign law: like charges repel, unlike attract") {
    const GreenEngine g = GreenEngine::image_form(Domain::disk({0, 0}, 50.0));
    const Vec2 z1{0.5, 0.0}, z2{-0.5, 0.0};
    const Vec2 sep = (z1 - z2).normalized();
    const Vec2 f_same = peach_koehler({{z1, z2}, {1, 1}}, g, 0);
    CHECK(f_same.dot(sep) > 0.0);
    const Vec2 f_opp = peach_koehler({{z1, z2}, {1, -1}}, g, 0);
    CHECK(f_opp.dot(sep) < 0.0);
}

TEST_CASE("energy decreases toward the boundary and at pair coalescence") {
    const GreenEngine g = GreenEngine::image_form(Domain::unit_disk());
    double prev = renormalized_energy({{{0.90, 0.0}}, {1}}, g);
    for (double r = 0.91; r < 0.995; r += 0.01) {
        const double e = renormalized_energy({{{r, 0.0}}, {1}}, g);
        CHECK(e < prev);
        prev = e;
    }
    prev = renormalized_energy({{{0.1, 0.0}, {-0.1, 0.0}}, {1, -1}}, g);
    for (double s : {0.08, 0.05, 0.02, 0.01}) {
        const double e = renormalized_energy({{{s, 0.0}, {-s, 0.0}}, {1, -1}}, g);
        CHECK(e < prev);
        prev = e;
    }
}

TEST_CASE("near-boundary force decomposition") {
    const GreenEngine g = GreenEngine::image_form(Domain::unit_disk());
    const auto dec = near_boundary_decomposition({{{0.99, 0.0}}, {1}}, g, 0);
    CHECK(dec.boundary_distance == doctest::Approx(0.01));
    CHECK(dec.leading.x == doctest::Approx(1.0 / (4.0 * kPi * 0.01)).epsilon(1e-12));
    CHECK((dec.leading + dec.remainder).x == doctest::Approx(7.917759).epsilon(1e-5));
    CHECK(dec.remainder.norm() == doctest::Approx(0.039988).epsilon(1e-3));

    // remainder stays bounded as d -> 0 (limit 1/(8 pi) on the disk)
    for (double d : {1e-2, 1e-3, 1e-4}) {
        const auto r = near_boundary_decomposition({{{1.0 - d, 0.0}}, {1}}, g, 0);
        CHECK(r.remainder.norm() <= 0.2);
    }

    // log-log slope of f . nu against d
    std::vector<double> logd, logf;
    for (double d = 1e-4; d <= 1.0000001e-2; d *= std::pow(10.0, 0.25)) {
        const Configuration cfg{{{1.0 - d, 0.0}}, {1}};
        const Vec2 f = peach_koehler(cfg, g, 0);
        logd.push_back(std::log(d));
        logf.push_back(std::log(f.x));
    }
    CHECK(oracles::ols_slope(logd, logf) == doctest::Approx(-1.0).epsilon(0.02));

    CHECK_THROWS_AS((void)near_boundary_decomposition({{{0.1, 0.0}}, {1}}, g, 0),
                    NotInRegion);
}

TEST_CASE("circulation of the strain field") {
    const GreenEngine g = GreenEngine::image_form(Domain::unit_disk());
    const Configuration pair{{{0.2, 0.0}, {-0.2, 0.0}}, {1, -1}};
    CHECK(circulation(pair, g, {0.2, 0.0}, 0.05) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(circulation(pair, g, {-0.2, 0.0}, 0.05) == doctest::Approx(-1.0).epsilon(1e-8));
    CHECK(circulation(pair, g, {0.0, 0.0}, 0.45) == doctest::Approx(0.0).epsilon(1e-8));

    CHECK_THROWS_AS((void)circulation(pair, g, {0.2, 0.0}, 0.9), LoopIntersectsSingularity);
    CHECK_THROWS_AS((void)circulation(pair, g, {0.0, 0.0}, 0.2), LoopIntersectsSingularity);
    CHECK_THROWS_AS((void)strain_eval(pair, g, {0.2, 0.0}), EvaluationAtSingularity);
}

TEST_CASE("strain field is divergence- and curl-free away from dislocations") {
    const GreenEngine g = GreenEngine::image_form(Domain::unit_disk());
    const Configuration cfg{{{0.3, 0.1}, {-0.4, -0.2}}, {1, 1}};
    auto h = [&](Vec2 x) { return strain_eval(cfg, g, x); };
    for (const Vec2 x : {Vec2{0.0, 0.4}, Vec2{0.5, -0.3}, Vec2{-0.1, 0.6}}) {
        const double s = 1e-5;
        const double div = (h({x.x + s, x.y}).x - h({x.x - s, x.y}).x +
                            h({x.x, x.y + s}).y - h({x.x, x.y - s}).y) /
                           (2.0 * s);
        const double curl = (h({x.x + s, x.y}).y - h({x.x - s, x.y}).y -
                             h({x.x, x.y + s}).x + h({x.x, x.y - s}).x) /
                            (2.0 * s);
        CHECK(std::abs(div) < 1e-6);
        CHECK(std::abs(curl) < 1e-6);
    }
}

TEST_CASE("core energy: logarithmic growth and renormalized intercept") {
    const GreenEngine g = GreenEngine::image_form(Domain::unit_disk());

    // single dislocation at the origin: E_eps = |log eps| / (4 pi) exactly
    const Configuration single{{{0.0, 0.0}}, {1}};
    const std::vector<double> eps_list{1e-2, 3.162e-3, 1e-3, 3.162e-4, 1e-4};
    const LogFit fit = extract_renormalized(single, g, eps_list);
    CHECK(fit.slope == doctest::Approx(1.0 / (4.0 * kPi)).epsilon(0.01));
    CHECK(std::abs(fit.intercept) < 1e-2);

    // same-sign pair: intercept estimates the renormalized energy
    const Configuration pair{{{0.3, 0.0}, {-0.3, 0.1}}, {1, 1}};
    const LogFit fit2 = extract_renormalized(pair, g, eps_list);
    CHECK(fit2.slope == doctest::Approx(2.0 / (4.0 * kPi)).epsilon(0.01));
    CHECK(std::abs(fit2.intercept - renormalized_energy(pair, g)) < 1e-2);

    // opposite-sign pair at (+-0.1, 0): quadrature route against the
    // k/h formula route
    const Configuration dipole{{{0.1, 0.0}, {-0.1, 0.0}}, {1, -1}};
    const LogFit fit3 = extract_renormalized(dipole, g, {1e-2, 3e-3, 1e-3});
    CHECK(std::abs(fit3.intercept - renormalized_energy(dipole, g)) < 1e-2);

    CHECK_THROWS_AS((void)core_energy(single, g, 0.6), CoresOverlap);
}

TEST_CASE("boundary-integral forces match finite differences on an ellipse") {
    const GreenEngine g = GreenEngine::boundary_integral(Domain::ellipse(1.6, 1.0, 192), 192);
    const Configuration cfg{{{0.6, 0.2}, {-0.5, -0.3}}, {1, -1}};
    const auto forces = peach_koehler_all(cfg, g);
    for (int i = 0; i < cfg.size(); ++i) {
        auto e_of = [&](Vec2 z) {
            Configuration c = cfg;
            c.positions[i] = z;
            return renormalized_energy(c, g);
        };
        const Vec2 fd = oracles::fd_grad(e_of, cfg.positions[i], 1e-6);
        CHECK((forces[i] + fd).norm() / std::max(1e-3, forces[i].norm()) < 1e-5);
    }
}

TEST_CASE("core energy: slope counts dislocations for mixed signs") {
    const GreenEngine g = GreenEngine::image_form(Domain::unit_disk());
    const Configuration cfg{{{0.3, 0.0}, {-0.3, 0.0}, {0.0, 0.4}}, {1, -1, 1}};
    const LogFit fit = extract_renormalized(cfg, g, {1e-2, 1e-3, 1e-4});
    CHECK(fit.slope == doctest::Approx(3.0 / (4.0 * kPi)).epsilon(0.01));
}

#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dislocore/dynamics.hpp"
#include "oracles.hpp"

using namespace dislocore;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("single dislocation escapes through the boundary at the analytic time") {
    const GreenEngine g = GreenEngine::image_form(Domain::unit_disk());
    IntegratorOpts opts;
    opts.t_max = 1.0;
    opts.collision_radius = 1e-5;
    const Trajectory tr = simulate({{{0.95, 0.0}}, {1}}, g, opts);

    REQUIRE(tr.terminal_event.kind == EventKind::BoundaryCollision);
    CHECK(tr.terminal_event.index_a == 0);
    // radial ODE oracle, integrated to the stopping radius
    const double t_oracle = oracles::disk_boundary_collision_time(0.95, 1.0 - 1e-5);
    CHECK(tr.terminal_event.time == doctest::Approx(t_oracle).epsilon(1e-7));
    CHECK(tr.terminal_event.time == doctest::Approx(0.015980).epsilon(1e-3));
    CHECK(dist(tr.terminal_event.location, {1.0, 0.0}) < 1e-6);
}

TEST_CASE("stationary dislocation at the center reaches the horizon") {
    const GreenEngine g = GreenEngine::image_form(Domain::unit_disk());
    IntegratorOpts opts;
    opts.t_max = 0.5;
    const Trajectory tr = simulate({{{0.0, 0.0}}, {1}}, g, opts);
    CHECK(tr.terminal_event.kind == EventKind::Horizon);
    CHECK(tr.samples.back().positions[0].norm() < 1e-9);
}

TEST_CASE("opposite pair collides at the dipole time") {
    const GreenEngine g = GreenEngine::image_form(Domain::disk({0, 0}, 50.0));
    IntegratorOpts opts;
    opts.t_max = 1.0;
    opts.collision_radius = 1e-4;
    const Trajectory tr = simulate({{{0.05, 0.0}, {-0.05, 0.0}}, {1, -1}}, g, opts);
    REQUIRE(tr.terminal_event.kind == EventKind::PairCollision);
    CHECK(tr.terminal_event.time ==
          doctest::Approx(oracles::dipole_collision_time(0.1)).epsilon(0.02));
    CHECK(tr.terminal_event.location.norm() < 1e-3); // near the origin
}

TEST_CASE("energy is non-increasing along trajectories") {
    const GreenEngine g = GreenEngine::image_form(Domain::unit_disk());
    IntegratorOpts opts;
    opts.t_max = 2.0; // runs into the first collision event
    const Trajectory tr =
        simulate({{{0.6, 0.1}, {-0.4, 0.3}, {0.1, -0.5}}, {1, 1, -1}}, g, opts);
    CHECK(tr.terminal_event.kind != EventKind::Horizon);
    REQUIRE(tr.samples.size() > 20);
    for (std::size_t k = 1; k < tr.samples.size(); ++k)
        CHECK(tr.samples[k].energy <= tr.samples[k - 1].energy + 10.0 * opts.abs_tol);
}

TEST_CASE("tolerance refinement leaves the collision time stable") {
    const GreenEngine g = GreenEngine::image_form(Domain::unit_disk());
    IntegratorOpts a;
    a.rel_tol = 1e-6;
    a.abs_tol = 1e-9;
    a.collision_radius = 1e-4;
    IntegratorOpts b = a;
    b.rel_tol = 5e-7;
    const Configuration cfg{{{0.9, 0.2}}, {1}};
    const double t1 = simulate(cfg, g, a).terminal_event.time;
    const double t2 = simulate(cfg, g, b).terminal_event.time;
    CHECK(std::abs(t1 - t2) < 5.0 * b.rel_tol * std::max(t1, 1.0));
}

TEST_CASE("mirror-symmetric data yields mirror-symmetric trajectories") {
    const GreenEngine g = GreenEngine::image_form(Domain::unit_disk());
    IntegratorOpts opts;
    opts.t_max = 0.02;
    const Trajectory tr = simulate({{{0.5, 0.3}, {0.5, -0.3}}, {1, 1}}, g, opts);
    for (const TrajectorySample& s : tr.samples) {
        CHECK(std::abs(s.positions[0].x - s.positions[1].x) < 1e-8);
        CHECK(std::abs(s.positions[0].y + s.positions[1].y) < 1e-8);
    }
}

TEST_CASE("collision radius robustness: T varies quadratically") {
    const GreenEngine g = GreenEngine::image_form(Domain::unit_disk());
    const Configuration cfg{{{0.95, 0.0}}, {1}};
    IntegratorOpts opts;
    opts.t_max = 1.0;
    auto t_at = [&](double c) {
        IntegratorOpts o = opts;
        o.collision_radius = c;
        return simulate(cfg, g, o).terminal_event.time;
    };
    const double c = 1e-3;
    const double t1 = t_at(c), t2 = t_at(0.5 * c);
    CHECK(t2 > t1);
    CHECK(t2 - t1 < 4.0 * kPi * c * c);
}

TEST_CASE("annihilation continuation keeps the spectator moving") {
    const GreenEngine g = GreenEngine::image_form(Domain::disk({0, 0}, 50.0));
    IntegratorOpts opts;
    opts.t_max = 0.05;
    opts.collision_radius = 1e-4;
    opts.continue_after_event = true;
    const Trajectory tr =
        simulate({{{0.05, 0.0}, {-0.05, 0.0}, {5.0, 0.0}}, {1, -1, 1}}, g, opts);
    REQUIRE(tr.event_log.size() == 2);
    CHECK(tr.event_log[0].kind == EventKind::PairCollision);
    CHECK(tr.terminal_event.kind == EventKind::Horizon);
    CHECK(tr.samples.back().active == std::vector<int>{2});
}

TEST_CASE("step budget exhaustion reports a step failure") {
    const GreenEngine g = GreenEngine::image_form(Domain::unit_disk());
    IntegratorOpts opts;
    opts.t_max = 1.0;
    opts.max_steps = 3;
    const Trajectory tr = simulate({{{0.5, 0.0}}, {1}}, g, opts);
    CHECK(tr.terminal_event.kind == EventKind::StepFailure);
}

TEST_CASE("verify_boundary_bound: unit disk, delta0 = 0.05") {
    const GreenEngine g = GreenEngine::image_form(Domain::unit_disk());
    const BoundaryBoundReport rep = verify_boundary_bound(g, 0.05, 0.5, {});
    CHECK(rep.first_event_ok);
    CHECK(rep.t_measured ==
          doctest::Approx(oracles::disk_boundary_collision_time(0.95)).epsilon(1e-6));
    CHECK(rep.t_measured == doctest::Approx(0.015980).epsilon(1e-3));
    CHECK(rep.bound == doctest::Approx(2.0 * kPi * 0.05 * 0.05));
    CHECK(rep.ratio == doctest::Approx(1.017).epsilon(1e-3));
    CHECK(rep.within_bound);
}

TEST_CASE("verify_boundary_bound: quadratic scaling in delta0") {
    const GreenEngine g = GreenEngine::image_form(Domain::unit_disk());
    std::vector<double> logd, logt;
    for (double d0 : {0.0125, 0.025, 0.05}) {
        const BoundaryBoundReport rep = verify_boundary_bound(g, d0, 0.5, {});
        REQUIRE(rep.first_event_ok);
        CHECK(rep.within_bound);
        logd.push_back(std::log(d0));
        logt.push_back(std::log(rep.t_measured));
    }
    CHECK(oracles::ols_slope(logd, logt) == doctest::Approx(2.0).epsilon(0.025));
}

TEST_CASE("verify_boundary_bound: spectators stay put while z1 hits the wall") {
    const GreenEngine g = GreenEngine::image_form(Domain::unit_disk());
    Configuration spectators;
    spectators.positions = {{0.0, 0.3}, {0.0, -0.3}};
    spectators.moduli = {1, -1};
    const BoundaryBoundReport rep = verify_boundary_bound(g, 0.02, 0.5, spectators);
    CHECK(rep.first_event_ok);
    CHECK(rep.first_event.index_a == 0);
    CHECK(rep.within_bound);
}

TEST_CASE("verify_pair_bound: n = 2 dipole against the collision bound") {
    const GreenEngine g = GreenEngine::image_form(Domain::disk({0, 0}, 50.0));
    const PairBoundReport rep = verify_pair_bound(g, 0.1, 1.0, {});
    CHECK(rep.first_event_ok);
    CHECK(rep.denominator == doctest::Approx(0.99));
    CHECK(rep.bound == doctest::Approx(kPi * 0.01 / (2.0 * 0.99)).epsilon(1e-12));
    CHECK(rep.t_measured ==
          doctest::Approx(oracles::dipole_collision_time(0.1)).epsilon(0.02));
    CHECK(rep.within_bound);
}

TEST_CASE("verify_pair_bound: free-dipole limit as zeta0 shrinks") {
    const GreenEngine g = GreenEngine::image_form(Domain::disk({0, 0}, 50.0));
    for (double z0 : {0.1, 0.05}) {
        const PairBoundReport rep = verify_pair_bound(g, z0, 1.0, {});
        REQUIRE(rep.first_event_ok);
        CHECK(rep.t_measured / oracles::dipole_collision_time(z0) ==
              doctest::Approx(1.0).epsilon(0.02));
    }
}

TEST_CASE("verify_pair_bound: one spectator, pair still collides first") {
    const GreenEngine g = GreenEngine::image_form(Domain::disk({0, 0}, 50.0));
    Configuration spectators;
    spectators.positions = {{0.0, 1.2}};
    spectators.moduli = {1};
    const PairBoundReport rep = verify_pair_bound(g, 0.05, 1.0, spectators);
    CHECK(rep.first_event_ok);
    CHECK(rep.denominator == doctest::Approx(1.0 - 0.0025 - 2.0 * 0.05));
    CHECK(rep.within_bound);
}

TEST_CASE("verify_pair_bound: degenerate denominator is rejected") {
    const GreenEngine g = GreenEngine::image_form(Domain::disk({0, 0}, 50.0));
    Configuration spectators;
    spectators.positions = {{0.0, 1.5}, {0.0, -1.5}};
    spectators.moduli = {1, 1};
    CHECK_THROWS_AS((void)verify_pair_bound(g, 0.4, 1.0, spectators), BoundDegenerate);
}

TEST_CASE("boundary-integral backend drives dynamics on an ellipse") {
    const Domain ell = Domain::ellipse(2.0, 1.0, 192);
    const GreenEngine g = GreenEngine::boundary_integral(ell, 192);
    IntegratorOpts opts;
    opts.t_max = 1.0;
    opts.rel_tol = 1e-6;
    opts.abs_tol = 1e-8;
    opts.collision_radius = 5e-3;
    opts.record_energy = false; // keep the per-step cost to the force solves
    // start near the flat side; the wall attracts
    const Trajectory tr = simulate({{{0.0, 0.82}}, {1}}, g, opts);
    REQUIRE(tr.terminal_event.kind == EventKind::BoundaryCollision);
    CHECK(tr.terminal_event.time > 0.0);
    // the escape stays on the symmetry axis and exits near (0, 1)
    CHECK(std::abs(tr.terminal_event.location.x) < 1e-3);
    CHECK(tr.terminal_event.location.y == doctest::Approx(1.0).epsilon(1e-2));
}

TEST_CASE("simulate rejects a separation below twice the collision radius") {
    const GreenEngine g = GreenEngine::image_form(Domain::unit_disk());
    IntegratorOpts opts;
    opts.collision_radius = 0.1;
    CHECK_THROWS_AS((void)simulate({{{0.05, 0.0}, {-0.05, 0.0}}, {1, -1}}, g, opts), Error);
}

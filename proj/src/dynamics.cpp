#include "dislocore/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dislocore/errors.hpp"

namespace dislocore {

namespace {

constexpr double kPi = std::numbers::pi;

using State = std::vector<Vec2>;

// Dormand-Prince 5(4) tableau.
constexpr double A21 = 1.0 / 5;
constexpr double A31 = 3.0 / 40, A32 = 9.0 / 40;
constexpr double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
constexpr double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187, A53 = 64448.0 / 6561,
                 A54 = -212.0 / 729;
constexpr double A61 = 9017.0 / 3168, A62 = -355.0 / 33, A63 = 46732.0 / 5247,
                 A64 = 49.0 / 176, A65 = -5103.0 / 18656;
constexpr double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192, B5 = -2187.0 / 6784,
                 B6 = 11.0 / 84;
constexpr double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                 E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;
constexpr double D1 = -12715105075.0 / 11282082432.0, D3 = 87487479700.0 / 32700410799.0,
                 D4 = -10690763975.0 / 1880347072.0, D5 = 701980252875.0 / 199316789632.0,
                 D6 = -1453857185.0 / 822651844.0, D7 = 69997945.0 / 29380423.0;

State axpy(const State& y, double h, const State& k) {
    State r(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) r[i] = y[i] + h * k[i];
    return r;
}

struct DenseStep {
    double t0 = 0.0, h = 0.0;
    State c1, c2, c3, c4, c5;

    State eval(double theta) const {
        const double th1 = 1.0 - theta;
        State r(c1.size());
        for (std::size_t i = 0; i < c1.size(); ++i)
            r[i] = c1[i] +
                   theta * (c2[i] + th1 * (c3[i] + theta * (c4[i] + th1 * c5[i])));
        return r;
    }
};

struct EventScan {
    EventKind kind = EventKind::Horizon;
    double value = std::numeric_limits<double>::infinity(); // min proximity minus radius
    int a = -1, b = -1;
};

class Stepper {
public:
    Stepper(const GreenEngine& engine, std::vector<int> moduli)
        : engine_(engine), moduli_(std::move(moduli)) {}

    State rhs(const State& z) const {
        Configuration cfg{z, moduli_};
        return peach_koehler_all(cfg, engine_);
    }

    // One DP5 attempt from (t, y, f) with step h. Returns the error estimate;
    // fills ynew, fnew and the dense-output coefficients.
    double attempt(double t, const State& y, const State& f, double h, State& ynew,
                   State& fnew, DenseStep& dense, double atol, double rtol) const {
        (void)t;
        const std::size_t n = y.size();
        const State k1 = f;
        const State k2 = rhs(axpy(y, h * A21, k1));
        State tmp(n);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        const State k3 = rhs(tmp);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        const State k4 = rhs(tmp);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        const State k5 = rhs(tmp);
        for (std::size_t i = 0; i < n; ++i)
            tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] +
                                 A65 * k5[i]);
        const State k6 = rhs(tmp);
        ynew.resize(n);
        for (std::size_t i = 0; i < n; ++i)
            ynew[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] +
                                  B6 * k6[i]);
        fnew = rhs(ynew); // FSAL stage k7

        double err_sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] +
                                E6 * k6[i] + E7 * fnew[i]);
            const double sx = atol + rtol * std::max(std::abs(y[i].x), std::abs(ynew[i].x));
            const double sy = atol + rtol * std::max(std::abs(y[i].y), std::abs(ynew[i].y));
            err_sq += (e.x / sx) * (e.x / sx) + (e.y / sy) * (e.y / sy);
        }
        const double err = std::sqrt(err_sq / (2.0 * n));

        dense.h = h;
        dense.c1 = y;
        dense.c2.resize(n);
        dense.c3.resize(n);
        dense.c4.resize(n);
        dense.c5.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            const Vec2 ydiff = ynew[i] - y[i];
            const Vec2 bspl = h * k1[i] - ydiff;
            dense.c2[i] = ydiff;
            dense.c3[i] = bspl;
            dense.c4[i] = ydiff - h * fnew[i] - bspl;
            dense.c5[i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] +
                               D6 * k6[i] + D7 * fnew[i]);
        }
        return err;
    }

private:
    const GreenEngine& engine_;
    std::vector<int> moduli_;
};

EventScan scan_events(const Domain& dom, const State& z, const std::vector<int>& moduli,
                      double radius) {
    EventScan best;
    // boundary proximity (signed: interpolated states may sit outside)
    for (std::size_t i = 0; i < z.size(); ++i) {
        const double d = dom.signed_boundary_distance(z[i]) - radius;
        if (d < best.value) best = {EventKind::BoundaryCollision, d, static_cast<int>(i), -1};
    }
    // pair proximity: opposite sign collides, same sign is a step failure
    for (std::size_t i = 0; i < z.size(); ++i) {
        for (std::size_t j = i + 1; j < z.size(); ++j) {
            const double d = dist(z[i], z[j]) - radius;
            if (d < best.value) {
                const EventKind kind = (moduli[i] != moduli[j]) ? EventKind::PairCollision
                                                                : EventKind::StepFailure;
                best = {kind, d, static_cast<int>(i), static_cast<int>(j)};
            }
        }
    }
    return best;
}

} // namespace

Trajectory simulate(const Configuration& initial, const GreenEngine& engine,
                    IntegratorOpts opts) {
    const Domain& dom = engine.domain();
    initial.validate(dom);
    if (opts.collision_radius <= 0.0) opts.collision_radius = 1e-4 * dom.diameter();
    if (!(separation(initial.positions, dom) > 2.0 * opts.collision_radius))
        throw Error("simulate: initial separation must exceed twice the collision radius");

    Trajectory traj;
    traj.moduli = initial.moduli;

    // Active subset of the original dislocations (shrinks in continuation mode).
    std::vector<int> active(initial.positions.size());
    for (std::size_t i = 0; i < active.size(); ++i) active[i] = static_cast<int>(i);
    State y = initial.positions;
    std::vector<int> moduli = initial.moduli;
    double t = 0.0;

    auto push_sample = [&](double time, const State& z) {
        TrajectorySample s;
        s.time = time;
        s.positions = z;
        s.active = active;
        if (opts.record_energy) s.energy = renormalized_energy({z, moduli}, engine);
        traj.samples.push_back(std::move(s));
    };

    push_sample(0.0, y);

    while (true) {
        Stepper stepper(engine, moduli);
        State f = stepper.rhs(y);

        // initial step from the classic d0/d1 heuristic
        double h;
        {
            double d0 = 0.0, d1 = 0.0;
            for (const Vec2& v : y) d0 = std::max(d0, std::max(std::abs(v.x), std::abs(v.y)));
            for (const Vec2& v : f) d1 = std::max(d1, std::max(std::abs(v.x), std::abs(v.y)));
            h = (d1 > 1e-12) ? 0.01 * std::max(d0, 1e-3) / d1 : 1e-4 * (opts.t_max - t);
            h = std::min(h, opts.t_max - t);
        }

        bool leg_done = false;
        Event leg_event;
        long stride_count = 0;

        while (!leg_done) {
            if (traj.steps + traj.rejections > opts.max_steps) {
                leg_event = {EventKind::StepFailure, t, -1, -1, {}};
                leg_done = true;
                break;
            }
            if (t >= opts.t_max) {
                leg_event = {EventKind::Horizon, opts.t_max, -1, -1, {}};
                leg_done = true;
                break;
            }
            h = std::min(h, opts.t_max - t);
            if (h < opts.min_step) {
                leg_event = {EventKind::StepFailure, t, -1, -1, {}};
                leg_done = true;
                break;
            }

            State ynew, fnew;
            DenseStep dense;
            double err;
            try {
                err = stepper.attempt(t, y, f, h, ynew, fnew, dense, opts.abs_tol, opts.rel_tol);
            } catch (const Error&) {
                // stage overshot the domain or a coincidence; retry smaller
                h *= 0.2;
                ++traj.rejections;
                continue;
            }
            if (!std::isfinite(err)) {
                h *= 0.2;
                ++traj.rejections;
                continue;
            }
            if (err > 1.0) {
                h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
                ++traj.rejections;
                continue;
            }

            dense.t0 = t;
            const double t1 = t + h;
            const EventScan scan = scan_events(dom, ynew, moduli, opts.collision_radius);
            if (scan.value <= 0.0) {
                // Bisect the dense output for the earliest crossing.
                double lo = 0.0, hi = 1.0;
                EventScan at_hi = scan;
                for (int it = 0; it < 80 && (hi - lo) > 1e-12; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const EventScan s =
                        scan_events(dom, dense.eval(mid), moduli, opts.collision_radius);
                    if (s.value <= 0.0) {
                        hi = mid;
                        at_hi = s;
                    } else {
                        lo = mid;
                    }
                }
                const double t_event = t + hi * h;
                const State z_event = dense.eval(hi);
                leg_event.kind = at_hi.kind;
                leg_event.time = t_event;
                leg_event.index_a = active[at_hi.a];
                leg_event.index_b = at_hi.b >= 0 ? active[at_hi.b] : -1;
                if (at_hi.kind == EventKind::BoundaryCollision)
                    leg_event.location = dom.nearest_boundary(z_event[at_hi.a]).point.position;
                else if (at_hi.b >= 0)
                    leg_event.location = 0.5 * (z_event[at_hi.a] + z_event[at_hi.b]);
                push_sample(t_event, z_event);

                if (opts.continue_after_event &&
                    leg_event.kind != EventKind::StepFailure) {
                    // absorb / annihilate, then restart the stepper on the rest
                    std::vector<int> keep;
                    for (std::size_t i = 0; i < z_event.size(); ++i) {
                        if (static_cast<int>(i) == at_hi.a) continue;
                        if (leg_event.kind == EventKind::PairCollision &&
                            static_cast<int>(i) == at_hi.b)
                            continue;
                        keep.push_back(static_cast<int>(i));
                    }
                    traj.event_log.push_back(leg_event);
                    if (keep.empty()) {
                        traj.terminal_event = leg_event;
                        return traj;
                    }
                    State y2;
                    std::vector<int> m2, a2;
                    for (int i : keep) {
                        y2.push_back(z_event[i]);
                        m2.push_back(moduli[i]);
                        a2.push_back(active[i]);
                    }
                    y = std::move(y2);
                    moduli = std::move(m2);
                    active = std::move(a2);
                    t = t_event;
                    leg_done = true; // restart outer loop with a fresh stepper
                    break;
                }
                traj.event_log.push_back(leg_event);
                traj.terminal_event = leg_event;
                return traj;
            }

            // accepted
            t = t1;
            y = ynew;
            f = fnew;
            ++traj.steps;
            if (++stride_count % opts.sample_stride == 0) push_sample(t, y);
            h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(err, 1e-10), -0.2)));
        }

        if (leg_event.kind == EventKind::Horizon || leg_event.kind == EventKind::StepFailure) {
            if (traj.samples.back().time < t) push_sample(t, y);
            traj.event_log.push_back(leg_event);
            traj.terminal_event = leg_event;
            return traj;
        }
        // otherwise: continuation restart with the reduced configuration
    }
}

namespace {

double run_first_event_time(const Configuration& cfg, const GreenEngine& engine,
                            IntegratorOpts opts, Event& ev) {
    Trajectory tr = simulate(cfg, engine, opts);
    ev = tr.terminal_event;
    return tr.terminal_event.time;
}

} // namespace

BoundaryBoundReport verify_boundary_bound(const GreenEngine& engine, double delta0,
                                          double gamma0, const Configuration& spectators,
                                          double bound_slack_k, IntegratorOpts opts) {
    const Domain& dom = engine.domain();
    if (!(delta0 < gamma0)) throw ParameterOrder("verify_boundary_bound requires delta0 < gamma0");

    BoundaryBoundReport rep;
    rep.delta0 = delta0;
    rep.gamma0 = gamma0;

    const BoundaryPoint bp = dom.boundary_point(0.0);
    Configuration cfg;
    cfg.positions.push_back(bp.position - delta0 * bp.outward_normal);
    cfg.moduli.push_back(1);
    for (std::size_t i = 0; i < spectators.positions.size(); ++i) {
        cfg.positions.push_back(spectators.positions[i]);
        cfg.moduli.push_back(spectators.moduli[i]);
    }
    cfg.validate(dom);
    // membership in the closure of D_{n,delta0,gamma0}
    if (dom.nearest_boundary(cfg.positions[0]).distance > delta0 * (1.0 + 1e-9))
        throw NotInRegion("dislocation 1 is farther than delta0 from the boundary");
    if (cfg.size() > 1) {
        const std::vector<Vec2> tail(cfg.positions.begin() + 1, cfg.positions.end());
        if (!(separation(tail, dom) > gamma0))
            throw NotInRegion("spectators are not gamma0-separated");
    }
    rep.initial = cfg;

    rep.bound = 2.0 * kPi * delta0 * delta0;
    rep.slack = 1.0 + bound_slack_k * delta0;
    if (opts.collision_radius <= 0.0) opts.collision_radius = delta0 / 200.0;
    if (opts.t_max <= 0.0 || opts.t_max == IntegratorOpts{}.t_max)
        opts.t_max = 8.0 * rep.bound;

    Event ev1, ev2;
    rep.t_coarse = run_first_event_time(cfg, engine, opts, ev1);
    IntegratorOpts half = opts;
    half.collision_radius = 0.5 * opts.collision_radius;
    rep.t_half = run_first_event_time(cfg, engine, half, ev2);
    rep.first_event = ev2;
    rep.first_event_ok =
        ev1.kind == EventKind::BoundaryCollision && ev1.index_a == 0 &&
        ev2.kind == EventKind::BoundaryCollision && ev2.index_a == 0;
    // collision-time deficit is O(radius^2)
    rep.t_measured = (4.0 * rep.t_half - rep.t_coarse) / 3.0;
    rep.ratio = rep.t_measured / rep.bound;
    rep.within_bound = rep.first_event_ok && rep.t_measured <= rep.bound * rep.slack;
    return rep;
}

PairBoundReport verify_pair_bound(const GreenEngine& engine, double zeta0, double eta0,
                                  const Configuration& spectators, IntegratorOpts opts) {
    const Domain& dom = engine.domain();
    if (!(zeta0 < eta0)) throw ParameterOrder("verify_pair_bound requires zeta0 < eta0");

    PairBoundReport rep;
    rep.zeta0 = zeta0;
    rep.eta0 = eta0;

    Configuration cfg;
    const Vec2 c0 = dom.center();
    cfg.positions.push_back(c0 + Vec2{0.5 * zeta0, 0.0});
    cfg.positions.push_back(c0 - Vec2{0.5 * zeta0, 0.0});
    cfg.moduli = {1, -1};
    for (std::size_t i = 0; i < spectators.positions.size(); ++i) {
        cfg.positions.push_back(spectators.positions[i]);
        cfg.moduli.push_back(spectators.moduli[i]);
    }
    cfg.validate(dom);
    const int n = cfg.size();

    // membership in the closure of C_{n,zeta0,eta0}
    if (dist(cfg.positions[0], cfg.positions[1]) > zeta0 * (1.0 + 1e-9))
        throw NotInRegion("pair separation exceeds zeta0");
    for (int i = 0; i < 2; ++i) {
        if (!(dom.nearest_boundary(cfg.positions[i]).distance > eta0))
            throw NotInRegion("pair is within eta0 of the boundary");
        for (int j = 2; j < n; ++j)
            if (!(dist(cfg.positions[i], cfg.positions[j]) > eta0))
                throw NotInRegion("pair is within eta0 of a spectator");
    }
    if (n > 2) {
        const std::vector<Vec2> tail(cfg.positions.begin() + 2, cfg.positions.end());
        if (!(separation(tail, dom) > eta0)) throw NotInRegion("spectators not eta0-separated");
    }
    rep.initial = cfg;

    rep.denominator = eta0 * eta0 - zeta0 * zeta0 - 2.0 * (n - 2) * zeta0 * eta0;
    if (!(rep.denominator > 0.0))
        throw BoundDegenerate("pair bound denominator is not positive");
    rep.bound = kPi * zeta0 * zeta0 * eta0 * eta0 / (2.0 * rep.denominator);

    if (opts.collision_radius <= 0.0) opts.collision_radius = zeta0 / 100.0;
    if (opts.t_max <= 0.0 || opts.t_max == IntegratorOpts{}.t_max)
        opts.t_max = 8.0 * rep.bound;

    Event ev1, ev2;
    rep.t_coarse = run_first_event_time(cfg, engine, opts, ev1);
    IntegratorOpts half = opts;
    half.collision_radius = 0.5 * opts.collision_radius;
    rep.t_half = run_first_event_time(cfg, engine, half, ev2);
    rep.first_event = ev2;
    auto pair_ok = [](const Event& e) {
        return e.kind == EventKind::PairCollision &&
               ((e.index_a == 0 && e.index_b == 1) || (e.index_a == 1 && e.index_b == 0));
    };
    rep.first_event_ok = pair_ok(ev1) && pair_ok(ev2);
    rep.t_measured = (4.0 * rep.t_half - rep.t_coarse) / 3.0;
    rep.ratio = rep.t_measured / rep.bound;
    rep.within_bound = rep.first_event_ok && rep.t_measured <= rep.bound;
    return rep;
}

} // namespace dislocore

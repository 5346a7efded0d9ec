#pragma once

#include <vector>

#include "dislocore/energy.hpp"
#include "dislocore/geometry.hpp"
#include "dislocore/green.hpp"

namespace dislocore {

struct IntegratorOpts {
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    double t_max = 1.0;
    /// Termination proximity; values <= 0 select 1e-4 * diam(domain).
    double collision_radius = 0.0;
    double min_step = 1e-14;
    long max_steps = 5'000'000;
    int sample_stride = 1;
    bool record_energy = true;
    /// Absorb at the boundary / annihilate pairs and keep integrating.
    bool continue_after_event = false;
};

enum class EventKind { BoundaryCollision, PairCollision, Horizon, StepFailure };

struct Event {
    EventKind kind = EventKind::Horizon;
    double time = 0.0;
    int index_a = -1; // dislocation index (original numbering)
    int index_b = -1; // second index for pair collisions
    Vec2 location{};
};

struct TrajectorySample {
    double time = 0.0;
    std::vector<Vec2> positions;   // active dislocations only
    std::vector<int> active;       // original indices of the active dislocations
    double energy = 0.0;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    std::vector<int> moduli; // of the initial configuration
    Event terminal_event;
    std::vector<Event> event_log; // all events when continuation is on
    long steps = 0;
    long rejections = 0;
};

/// Integrates dz_i/dt = f_i (the Peach-Koehler force) with an embedded
/// Dormand-Prince 5(4) pair, terminating at the first of: boundary proximity,
/// opposite-sign pair proximity, or the horizon. Event times are refined by
/// bisection on the dense output. Same-sign near-contact is a step failure.
Trajectory simulate(const Configuration& initial, const GreenEngine& engine,
                    IntegratorOpts opts);

struct BoundaryBoundReport {
    double delta0 = 0.0, gamma0 = 0.0;
    Configuration initial;
    Event first_event;
    bool first_event_ok = false; // dislocation 1 hit the boundary first
    double t_coarse = 0.0;       // at the working collision radius
    double t_half = 0.0;         // at half the radius
    double t_measured = 0.0;     // Richardson extrapolation to zero radius
    double bound = 0.0;          // 2 pi delta0^2
    double slack = 0.0;          // multiplicative allowance 1 + K delta0
    double ratio = 0.0;
    bool within_bound = false;
};

/// Places dislocation 1 at distance delta0 from the boundary (normal inward
/// from the parameter origin), appends the spectators, integrates, and checks
/// the collision-time bound T <= 2 pi delta0^2 (1 + K delta0).
BoundaryBoundReport verify_boundary_bound(const GreenEngine& engine, double delta0,
                                          double gamma0, const Configuration& spectators,
                                          double bound_slack_k = 1.0,
                                          IntegratorOpts opts = {});

struct PairBoundReport {
    double zeta0 = 0.0, eta0 = 0.0;
    Configuration initial;
    Event first_event;
    bool first_event_ok = false; // pair (1,2) collided first
    double t_coarse = 0.0;
    double t_half = 0.0;
    double t_measured = 0.0;
    double denominator = 0.0; // eta0^2 - zeta0^2 - 2 (n-2) zeta0 eta0
    double bound = 0.0;       // pi zeta0^2 eta0^2 / (2 denominator)
    double ratio = 0.0;
    bool within_bound = false;
};

/// Places a +1/-1 pair at separation zeta0 around the domain center, appends
/// the spectators, and checks the pair collision-time bound.
PairBoundReport verify_pair_bound(const GreenEngine& engine, double zeta0, double eta0,
                                  const Configuration& spectators, IntegratorOpts opts = {});

} // namespace dislocore

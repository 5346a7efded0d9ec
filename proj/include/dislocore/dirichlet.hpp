#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "dislocore/geometry.hpp"
#include "dislocore/green.hpp"
#include "dislocore/harmonic.hpp"
#include "dislocore/quadrature.hpp"

namespace dislocore {

/// Tangential boundary strain f (arc-length parametrized) with total
/// circulation 2 pi. For multiplicity n the applied datum is n f.
class BoundaryDatum {
public:
    static BoundaryDatum uniform(const Domain& domain);
    /// Samples (arc parameter, value); fitted by a trigonometric series and
    /// validated for total circulation 2 pi (tolerance 1e-10 relative).
    static BoundaryDatum from_table(const Domain& domain,
                                    const std::vector<std::pair<double, double>>& table);

    const Domain& domain() const { return domain_; }
    bool is_uniform() const { return uniform_; }
    double value(double arc) const;     // f(s)
    double primitive(double arc) const; // P(s) = int_0^s f; P(perimeter) = 2 pi
    /// Primitive as a function of the curve parameter t (avoids the arc-length
    /// inversion when sampling boundary data).
    double primitive_param(double t) const;

    /// Arc positions of the jump points, one per center, each at the boundary
    /// point nearest its center (deterministic representative when ambiguous).
    std::vector<double> jump_points(const std::vector<Vec2>& centers) const;
    /// Piecewise primitive with a drop of 2 pi / n at each jump point.
    double g_with_jumps(double arc, const std::vector<double>& jumps) const;

private:
    BoundaryDatum(const Domain& domain, bool uniform);
    Domain domain_;
    bool uniform_ = true;
    TrigSeries series_; // f as a function of the curve parameter t, scaled by speed
};

/// Unit-strength rotational field K_a(x) = rot_ccw(x - a) / |x - a|^2;
/// |K_a| = 1/|x-a|, circulation 2 pi around a.
struct SingularField {
    Vec2 center;
    Vec2 operator()(Vec2 x) const {
        const Vec2 w = x - center;
        return w.rot90_ccw() / w.norm_sq();
    }
};

/// Laplace Dirichlet solver on a fixed domain: Fourier series on disks, the
/// Nystrom boundary-integral engine otherwise. Construction performs the
/// factorization; solves afterwards are pure and shareable.
class DirichletSolver {
public:
    explicit DirichletSolver(const Domain& domain, int resolution = 512);
    const Domain& domain() const { return domain_; }
    int resolution() const { return resolution_; }
    /// Harmonic extension of boundary values sampled uniformly in the curve
    /// parameter t (resolution() samples).
    std::shared_ptr<const Harmonic> solve(const std::vector<double>& samples) const;

private:
    Domain domain_;
    int resolution_;
    std::optional<GreenEngine> bie_;
};

/// Boundary trace n g - sum_i theta_{a_i} as a continuous (single-valued)
/// sample vector; throws JumpMismatch when the windings do not cancel.
std::vector<double> corrector_boundary_samples(const BoundaryDatum& datum,
                                               const std::vector<Vec2>& centers,
                                               int resolution);

/// Harmonic corrector v with boundary data n g - sum_i theta_{a_i}.
std::shared_ptr<const Harmonic> corrector(const DirichletSolver& solver,
                                          const BoundaryDatum& datum,
                                          const std::vector<Vec2>& centers);

/// Limit functional for one dislocation:
///   F(a) = pi log d(a) + (1/2) int_{Omega \ B_d(a)} |K_a + grad v_a|^2
///        + (1/2) int_{B_d(a)} |grad v_a|^2,
/// +infinity on boundary contact.
double limit_functional(const DirichletSolver& solver, const BoundaryDatum& datum, Vec2 a,
                        const QuadOpts& opts = QuadOpts::accurate());

/// n-dislocation limit functional (separations d_i = min_j {|a_i-a_j|/2,
/// dist(a_i, boundary)}); +infinity on coincidence or boundary contact.
double limit_functional_n(const DirichletSolver& solver, const BoundaryDatum& datum,
                          const std::vector<Vec2>& centers,
                          const QuadOpts& opts = QuadOpts::accurate());

/// Core-radius energy of the representation field sum_i K_{a_i} + grad v:
///   E_eps = (1/2) int_{Omega_eps} |sum_i K_{a_i} + grad v|^2.
double finite_eps_energy(const DirichletSolver& solver, const BoundaryDatum& datum,
                         const std::vector<Vec2>& centers, double eps,
                         const QuadOpts& opts = QuadOpts::accurate());

/// F_eps = E_eps - pi n |log eps|.
double renormalized_finite_eps(const DirichletSolver& solver, const BoundaryDatum& datum,
                               const std::vector<Vec2>& centers, double eps,
                               const QuadOpts& opts = QuadOpts::accurate());

/// Cross term int_Omega (K_{a_i} + grad v_{a_i}) . (K_{a_j} + grad v_{a_j})
/// of the pairwise decomposition of the n-dislocation functional.
double interaction_cross_term(const DirichletSolver& solver, const BoundaryDatum& datum,
                              Vec2 ai, Vec2 aj, const QuadOpts& opts = QuadOpts::accurate());

} // namespace dislocore

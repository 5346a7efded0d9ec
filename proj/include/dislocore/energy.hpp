#pragma once

#include <vector>

#include "dislocore/geometry.hpp"
#include "dislocore/green.hpp"
#include "dislocore/quadrature.hpp"
#include "dislocore/vec2.hpp"

namespace dislocore {

/// Signed dislocation configuration: positions strictly inside the domain,
/// pairwise distinct, Burgers moduli +1/-1 (immutable once attached).
struct Configuration {
    std::vector<Vec2> positions;
    std::vector<int> moduli;

    int size() const { return static_cast<int>(positions.size()); }
    void validate(const Domain& domain) const;
};

/// Renormalized energy
///   E_n = sum_{i<j} b_i b_j (k(z_i,z_j) - log|z_i-z_j|/2pi) + (1/2) sum_i h(z_i).
/// Coincident same-sign pairs return +infinity; coincident opposite-sign
/// pairs are an annihilation event owned by the dynamics layer and throw.
double renormalized_energy(const Configuration& cfg, const GreenEngine& engine);

/// Peach-Koehler force on dislocation i: minus the exact configuration
/// gradient of the renormalized energy, assembled from kernel gradients.
Vec2 peach_koehler(const Configuration& cfg, const GreenEngine& engine, int i);
std::vector<Vec2> peach_koehler_all(const Configuration& cfg, const GreenEngine& engine);

struct ForceDecomposition {
    Vec2 leading;   // nu(s) / (4 pi d)
    Vec2 remainder; // f_i - leading
    double boundary_distance = 0.0;
    BoundaryPoint nearest;
};

/// Splits the force on the dislocation nearest the boundary into the normal
/// leading term nu/(4 pi d) and the remainder, which stays bounded as d -> 0.
ForceDecomposition near_boundary_decomposition(const Configuration& cfg,
                                               const GreenEngine& engine, int i = 0);

/// Strain field h(x) = sum_i b_i rot_cw(grad_x G(x, z_i)); divergence- and
/// curl-free away from the dislocations, circulation b_i around z_i.
Vec2 strain_eval(const Configuration& cfg, const GreenEngine& engine, Vec2 x);

/// Trapezoid line integral of h . t around the circle (counterclockwise).
double circulation(const Configuration& cfg, const GreenEngine& engine, Vec2 center,
                   double radius, int quadrature_points = 512);

/// Core-radius energy E_eps = (1/2) int_{Omega_eps} |h|^2 by graded polar
/// quadrature around each core glued to a background star grid; refined until
/// two levels agree to rel_tol.
double core_energy(const Configuration& cfg, const GreenEngine& engine, double eps,
                   QuadOpts opts = QuadOpts::fast(), double rel_tol = 1e-4);

struct LogFit {
    double slope = 0.0;     // coefficient of |log eps|
    double intercept = 0.0; // estimates E_n
};

/// Least-squares fit of E_eps = slope |log eps| + intercept over eps_list.
LogFit extract_renormalized(const Configuration& cfg, const GreenEngine& engine,
                            const std::vector<double>& eps_list,
                            QuadOpts opts = QuadOpts::fast());

} // namespace dislocore

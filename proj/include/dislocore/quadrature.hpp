#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "dislocore/errors.hpp"
#include "dislocore/geometry.hpp"
#include "dislocore/vec2.hpp"

namespace dislocore {

struct QuadOpts {
    int angular = 192;      // trapezoid nodes in the angular direction
    int radial_panels = 12; // panels per radial line
    int gauss_order = 10;   // Gauss-Legendre points per panel
    bool geometric_grading = true; // grade panels geometrically toward the inner edge

    static QuadOpts fast() { return {96, 8, 8, true}; }
    static QuadOpts accurate() { return {384, 18, 12, true}; }

    QuadOpts scaled(double factor) const {
        QuadOpts o = *this;
        o.angular = static_cast<int>(std::lround(o.angular * factor));
        o.radial_panels = static_cast<int>(std::lround(o.radial_panels * factor));
        return o;
    }
};

struct GaussRule {
    std::vector<double> x; // nodes on [-1, 1]
    std::vector<double> w;
};

/// Gauss-Legendre rule of the given order (cached, thread-safe).
const GaussRule& gauss_rule(int order);

/// C-infinity plateau: 1 for rho <= m, 0 for rho >= cap, smooth between.
double plateau(double rho, double m, double cap);

/// Trapezoid rule for a smooth 2pi-periodic integrand.
template <class F>
double trapezoid_periodic(F&& f, int n) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double acc = 0.0;
    for (int j = 0; j < n; ++j) acc += f(two_pi * j / n);
    return acc * two_pi / n;
}

/// Integral of f over [r0, r1] by Gauss panels; geometric panel grading from
/// r0 resolves integrands with r0-edge concentration (requires r0 > 0).
template <class F>
double integrate_radial(F&& f, double r0, double r1, int panels, int order, bool geometric) {
    if (!(r1 > r0)) return 0.0;
    const GaussRule& rule = gauss_rule(order);
    double acc = 0.0;
    double lo = r0;
    const double ratio = (geometric && r0 > 0.0) ? std::pow(r1 / r0, 1.0 / panels) : 0.0;
    for (int p = 0; p < panels; ++p) {
        const double hi = (geometric && r0 > 0.0) ? r0 * std::pow(ratio, p + 1)
                                                  : r0 + (r1 - r0) * (p + 1) / panels;
        const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        for (std::size_t q = 0; q < rule.x.size(); ++q)
            acc += rule.w[q] * half * f(mid + half * rule.x[q]);
        lo = hi;
    }
    return acc;
}

/// Area integral of f over the star-shaped region
///   { c + rho (cos phi, sin phi) : inner(phi) <= rho <= R(phi) },
/// where R(phi) is the domain boundary seen from c. The angular direction
/// uses the periodic trapezoid rule, each ray Gauss panels (times the polar
/// Jacobian rho).
template <class F, class Inner>
double polar_region_integral(const Domain& domain, Vec2 c, Inner&& inner, F&& f,
                             const QuadOpts& opts) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    const GaussRule& rule = gauss_rule(opts.gauss_order);
    double acc = 0.0;
    for (int m = 0; m < opts.angular; ++m) {
        const double phi = two_pi * m / opts.angular;
        const double r1 = domain.radial_extent(c, phi);
        const double r0 = inner(phi);
        if (!(r1 > r0)) continue;
        const Vec2 dir{std::cos(phi), std::sin(phi)};
        double ray = 0.0;
        double lo = r0;
        const bool geo = opts.geometric_grading && r0 > 0.0;
        const double ratio = geo ? std::pow(r1 / r0, 1.0 / opts.radial_panels) : 0.0;
        for (int p = 0; p < opts.radial_panels; ++p) {
            const double hi = geo ? r0 * std::pow(ratio, p + 1)
                                  : r0 + (r1 - r0) * (p + 1) / opts.radial_panels;
            const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
            for (std::size_t q = 0; q < rule.x.size(); ++q) {
                const double rho = mid + half * rule.x[q];
                ray += rule.w[q] * half * rho * f(c + rho * dir);
            }
            lo = hi;
        }
        acc += ray;
    }
    return acc * two_pi / opts.angular;
}

template <class F>
double polar_region_integral(const Domain& domain, Vec2 c, double inner, F&& f,
                             const QuadOpts& opts) {
    return polar_region_integral(domain, c, [inner](double) { return inner; }, f, opts);
}

/// Area integral over a full annulus r0 < |x - c| < r1 (must lie inside the
/// domain of interest; no boundary clipping).
template <class F>
double annulus_integral(Vec2 c, double r0, double r1, F&& f, const QuadOpts& opts) {
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double acc = 0.0;
    for (int m = 0; m < opts.angular; ++m) {
        const double phi = two_pi * m / opts.angular;
        const Vec2 dir{std::cos(phi), std::sin(phi)};
        acc += integrate_radial([&](double rho) { return rho * f(c + rho * dir); }, r0, r1,
                                opts.radial_panels, opts.gauss_order, opts.geometric_grading);
    }
    return acc * two_pi / opts.angular;
}

struct PuncturedLayout {
    std::vector<double> patch_cap;     // outer radius of each cutoff patch
    std::vector<double> patch_plateau; // chi_i == 1 inside this radius
};

/// Patch geometry for the partition-of-unity integrator: each center gets a
/// cutoff patch inside the domain, clear of the other centers.
PuncturedLayout punctured_layout(const Domain& domain, const std::vector<Vec2>& centers,
                                 const std::vector<double>& hole_radii,
                                 double cap_fraction = 0.9);

/// Integral of f over the punctured domain  Omega \ union B_eps_i(c_i).
///
/// f may be singular at the centers up to O(1/rho^2) provided the holes are
/// positive, or O(1/rho) for zero-radius holes. Decomposition: smooth cutoff
/// chi_i per center (integrated on graded polar patches) plus the remainder
/// chi_0 = 1 - sum chi_i, which vanishes identically near the centers and is
/// integrated on a star grid anchored at the domain center.
template <class F>
double punctured_integral(const Domain& domain, const std::vector<Vec2>& centers,
                          const std::vector<double>& hole_radii, F&& f,
                          const QuadOpts& opts) {
    const PuncturedLayout lay = punctured_layout(domain, centers, hole_radii);
    double acc = 0.0;
    for (std::size_t i = 0; i < centers.size(); ++i) {
        const double m = lay.patch_plateau[i], cap = lay.patch_cap[i];
        acc += annulus_integral(
            centers[i], hole_radii[i], cap,
            [&](Vec2 x) { return plateau(dist(x, centers[i]), m, cap) * f(x); }, opts);
    }
    auto chi0 = [&](Vec2 x) {
        double c0 = 1.0;
        for (std::size_t i = 0; i < centers.size(); ++i)
            c0 -= plateau(dist(x, centers[i]), lay.patch_plateau[i], lay.patch_cap[i]);
        return c0;
    };
    acc += polar_region_integral(domain, domain.center(), 0.0,
                                 [&](Vec2 x) {
                                     const double c0 = chi0(x);
                                     return c0 == 0.0 ? 0.0 : c0 * f(x);
                                 },
                                 opts);
    return acc;
}

/// Refine node counts until two consecutive levels agree to rel_tol.
template <class Eval>
double refine_to_tolerance(Eval&& eval, QuadOpts opts, double rel_tol, int max_levels = 3) {
    double prev = eval(opts);
    for (int lvl = 0; lvl < max_levels; ++lvl) {
        opts = opts.scaled(1.6);
        const double cur = eval(opts);
        const double scale = std::max({std::abs(cur), std::abs(prev), 1e-12});
        if (std::abs(cur - prev) <= rel_tol * scale) return cur;
        prev = cur;
    }
    throw QuadratureNotConverged("refinement levels did not agree to requested tolerance");
}

} // namespace dislocore

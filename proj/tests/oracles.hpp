#pragma once

// Test-only oracles, independent of the implementation paths they check.

#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <vector>

#include "dislocore/vec2.hpp"

namespace oracles {

constexpr double kPi = std::numbers::pi;

/// Blow-up time of the radial gradient-flow ODE r' = r / (2 pi (1 - r^2)) on
/// the unit disk, integrated from r0 until radius r_stop:
///   T = 2 pi [ (log r - r^2/2) ]_{r0}^{r_stop}
inline double disk_boundary_collision_time(double r0, double r_stop = 1.0) {
    auto F = [](double r) { return std::log(r) - 0.5 * r * r; };
    return 2.0 * kPi * (F(r_stop) - F(r0));
}

/// Collision time of an isolated +/- pair under s' = -1/(pi s), from
/// separation s0 down to s_stop.
inline double dipole_collision_time(double s0, double s_stop = 0.0) {
    return 0.5 * kPi * (s0 * s0 - s_stop * s_stop);
}

/// Minimal radius of curvature of the ellipse (a cos t, b sin t), located by a
/// dense scan of the curvature formula kappa = a b / (a^2 sin^2 + b^2 cos^2)^{3/2}.
inline double ellipse_min_curvature_radius(double a, double b) {
    double max_kappa = 0.0;
    const int n = 20000;
    for (int j = 0; j < n; ++j) {
        const double t = 2.0 * kPi * j / n;
        const double s = a * std::sin(t), c = b * std::cos(t);
        const double w = std::sqrt(s * s + c * c);
        max_kappa = std::max(max_kappa, a * b / (w * w * w));
    }
    return 1.0 / max_kappa;
}

/// Central finite-difference gradient of a scalar function of one point.
inline dislocore::Vec2 fd_grad(const std::function<double(dislocore::Vec2)>& f,
                               dislocore::Vec2 x, double h) {
    return {(f({x.x + h, x.y}) - f({x.x - h, x.y})) / (2.0 * h),
            (f({x.x, x.y + h}) - f({x.x, x.y - h})) / (2.0 * h)};
}

/// Deterministic pseudo-random stream for test configurations.
struct Rng {
    std::uint64_t s;
    std::uint64_t next() {
        std::uint64_t z = (s += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return (next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    int sign() { return (next() & 1) ? 1 : -1; }
    /// uniform over the disk of the given radius
    dislocore::Vec2 in_disk(double radius, dislocore::Vec2 center = {}) {
        while (true) {
            const double x = uniform(-1.0, 1.0), y = uniform(-1.0, 1.0);
            if (x * x + y * y <= 1.0) return center + radius * dislocore::Vec2{x, y};
        }
    }
};

/// Ordinary least squares slope of y against x.
inline double ols_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace oracles

#include "dislocore/quadrature.hpp"

#include <map>
#include <mutex>

namespace dislocore {

namespace {

GaussRule build_gauss(int n) {
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    // Newton on Legendre polynomials, symmetric pairs.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double p1 = 0.0;
        for (int it = 0; it < 100; ++it) {
            p1 = 1.0;
            double p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * x * p2 - j * p3) / (j + 1.0);
            }
            const double dp = n * (x * p1 - p2) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        double p2 = 0.0;
        {
            p1 = 1.0;
            for (int j = 0; j < n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * x * p2 - j * p3) / (j + 1.0);
            }
        }
        const double dp = n * (x * p1 - p2) / (x * x - 1.0);
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        r.w[i] = r.w[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

} // namespace

const GaussRule& gauss_rule(int order) {
    static std::mutex mu;
    static std::map<int, GaussRule> cache;
    std::scoped_lock lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) it = cache.emplace(order, build_gauss(order)).first;
    return it->second;
}

double plateau(double rho, double m, double cap) {
    if (rho <= m) return 1.0;
    if (rho >= cap) return 0.0;
    const double t = (rho - m) / (cap - m);
    const double b0 = std::exp(-1.0 / (1.0 - t));
    const double b1 = std::exp(-1.0 / t);
    return b0 / (b0 + b1);
}

PuncturedLayout punctured_layout(const Domain& domain, const std::vector<Vec2>& centers,
                                 const std::vector<double>& hole_radii, double cap_fraction) {
    const std::size_t n = centers.size();
    PuncturedLayout lay;
    lay.patch_cap.resize(n);
    lay.patch_plateau.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double clearance = domain.nearest_boundary(centers[i]).distance;
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) clearance = std::min(clearance, 0.5 * dist(centers[i], centers[j]));
        const double cap = cap_fraction * clearance;
        const double m = std::max(0.5 * cap, 1.35 * hole_radii[i]);
        if (!(m < 0.95 * cap))
            throw QuadratureNotConverged("hole radius leaves no room for the cutoff transition");
        lay.patch_cap[i] = cap;
        lay.patch_plateau[i] = m;
    }
    return lay;
}

} // namespace dislocore

#include "dislocore/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dislocore/errors.hpp"

namespace dislocore {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kCoincidenceTol = 1e-12;

} // namespace

void Configuration::validate(const Domain& domain) const {
    if (positions.empty()) throw EmptyConfiguration("configuration has no dislocations");
    if (positions.size() != moduli.size())
        throw Error("configuration: moduli length must equal positions length");
    for (int b : moduli)
        if (b != 1 && b != -1) throw Error("configuration: Burgers moduli must be +1 or -1");
    for (const Vec2& z : positions)
        if (!domain.contains(z)) throw OutsideDomain("dislocation outside the domain");
    for (std::size_t i = 0; i < positions.size(); ++i)
        for (std::size_t j = i + 1; j < positions.size(); ++j)
            if (dist(positions[i], positions[j]) < kCoincidenceTol)
                throw CoincidentDislocations("positions must be pairwise distinct");
}

double renormalized_energy(const Configuration& cfg, const GreenEngine& engine) {
    const int n = cfg.size();
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double r = dist(cfg.positions[i], cfg.positions[j]);
            if (r < kCoincidenceTol) {
                if (cfg.moduli[i] == cfg.moduli[j])
                    return std::numeric_limits<double>::infinity();
                throw CoincidentDislocations(
                    "opposite-sign coincidence is an annihilation event, not an energy");
            }
            e += cfg.moduli[i] * cfg.moduli[j] *
                 (engine.regular_part(cfg.positions[i], cfg.positions[j]) - std::log(r) / kTwoPi);
        }
    }
    for (int i = 0; i < n; ++i) e += 0.5 * engine.robin(cfg.positions[i]);
    return e;
}

std::vector<Vec2> peach_koehler_all(const Configuration& cfg, const GreenEngine& engine) {
    const int n = cfg.size();
    std::vector<Vec2> grad(n);
    for (int i = 0; i < n; ++i) grad[i] = 0.5 * engine.grad_robin(cfg.positions[i]);
    // j-major so the boundary-integral backend reuses its per-y density cache
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            if (i == j) continue;
            const Vec2 d = cfg.positions[i] - cfg.positions[j];
            const double r2 = d.norm_sq();
            if (r2 < kCoincidenceTol * kCoincidenceTol)
                throw CoincidentDislocations("force undefined at coincident dislocations");
            const double bb = cfg.moduli[i] * cfg.moduli[j];
            grad[i] += bb * (engine.grad_regular(cfg.positions[i], cfg.positions[j]) -
                             d / (kTwoPi * r2));
        }
    }
    for (Vec2& g : grad) g = -g;
    return grad;
}

Vec2 peach_koehler(const Configuration& cfg, const GreenEngine& engine, int i) {
    return peach_koehler_all(cfg, engine)[static_cast<std::size_t>(i)];
}

ForceDecomposition near_boundary_decomposition(const Configuration& cfg,
                                               const GreenEngine& engine, int i) {
    const Domain& dom = engine.domain();
    const BoundaryProjection proj = dom.nearest_boundary(cfg.positions[i]);
    // admissible deltas satisfy delta < rho_bar and 2 delta < diam / 2
    const double gate = std::min(dom.uniform_disk_radius(), 0.25 * dom.diameter());
    if (proj.ambiguous || proj.distance >= gate)
        throw NotInRegion("dislocation too far from the boundary for the near-field split");
    for (int j = 0; j < cfg.size(); ++j)
        if (j != i && dom.nearest_boundary(cfg.positions[j]).distance <= proj.distance)
            throw NotInRegion("another dislocation is at least as close to the boundary");
    ForceDecomposition out;
    out.boundary_distance = proj.distance;
    out.nearest = proj.point;
    out.leading = proj.point.outward_normal / (4.0 * kPi * proj.distance);
    out.remainder = peach_koehler(cfg, engine, i) - out.leading;
    return out;
}

Vec2 strain_eval(const Configuration& cfg, const GreenEngine& engine, Vec2 x) {
    Vec2 h{};
    for (int i = 0; i < cfg.size(); ++i) {
        if (dist(x, cfg.positions[i]) < kCoincidenceTol)
            throw EvaluationAtSingularity("strain evaluated at a dislocation");
        h += cfg.moduli[i] * engine.grad_green(x, cfg.positions[i]).rot90_cw();
    }
    return h;
}

double circulation(const Configuration& cfg, const GreenEngine& engine, Vec2 center,
                   double radius, int quadrature_points) {
    const Domain& dom = engine.domain();
    if (dom.nearest_boundary(center).distance <= radius)
        throw LoopIntersectsSingularity("loop crosses the domain boundary");
    for (const Vec2& z : cfg.positions)
        if (std::abs(dist(z, center) - radius) < 1e-9)
            throw LoopIntersectsSingularity("loop passes through a dislocation");
    double acc = 0.0;
    for (int m = 0; m < quadrature_points; ++m) {
        const double th = kTwoPi * m / quadrature_points;
        const Vec2 dir{std::cos(th), std::sin(th)};
        const Vec2 tangent = dir.rot90_ccw();
        acc += strain_eval(cfg, engine, center + radius * dir).dot(tangent);
    }
    return acc * kTwoPi * radius / quadrature_points;
}

double core_energy(const Configuration& cfg, const GreenEngine& engine, double eps,
                   QuadOpts opts, double rel_tol) {
    cfg.validate(engine.domain());
    const double sep = separation(cfg.positions, engine.domain());
    if (!(eps < 0.5 * sep)) throw CoresOverlap("eps must be below separation/2");
    const std::vector<double> holes(cfg.positions.size(), eps);
    auto density = [&](Vec2 x) {
        const Vec2 h = strain_eval(cfg, engine, x);
        return 0.5 * h.norm_sq();
    };
    return refine_to_tolerance(
        [&](const QuadOpts& o) {
            return punctured_integral(engine.domain(), cfg.positions, holes, density, o);
        },
        opts, rel_tol);
}

LogFit extract_renormalized(const Configuration& cfg, const GreenEngine& engine,
                            const std::vector<double>& eps_list, QuadOpts opts) {
    if (eps_list.size() < 2) throw Error("extract_renormalized needs at least two eps values");
    for (std::size_t i = 1; i < eps_list.size(); ++i)
        if (!(eps_list[i] < eps_list[i - 1])) throw Error("eps_list must be decreasing");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const double m = static_cast<double>(eps_list.size());
    for (double eps : eps_list) {
        const double x = std::abs(std::log(eps));
        const double y = core_energy(cfg, engine, eps, opts);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    LogFit fit;
    fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / m;
    return fit;
}

} // namespace dislocore

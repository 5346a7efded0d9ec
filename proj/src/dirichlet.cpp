#include "dislocore/dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include "dislocore/errors.hpp"

namespace dislocore {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_h1(const Domain& domain) {
    if (!domain.convex())
        throw Error("boundary-datum machinery requires a convex domain (H1)");
}

// Harmonic extension on a disk from the Fourier coefficients of the trace.
class FourierHarmonic final : public Harmonic {
public:
    FourierHarmonic(Vec2 center, double radius, const TrigSeries& trace)
        : center_(center), radius_(radius), a0_(trace.a0) {
        // trailing modes below the noise floor contribute nothing
        std::size_t keep = trace.a.size();
        double scale = std::abs(trace.a0);
        for (std::size_t k = 0; k < trace.a.size(); ++k)
            scale = std::max({scale, std::abs(trace.a[k]), std::abs(trace.b[k])});
        while (keep > 0 && std::abs(trace.a[keep - 1]) + std::abs(trace.b[keep - 1]) <
                               1e-14 * std::max(scale, 1.0))
            --keep;
        coeff_.resize(keep);
        for (std::size_t k = 0; k < keep; ++k) coeff_[k] = {trace.a[k], -trace.b[k]};
    }

    double value(Vec2 x) const override {
        const std::complex<double> zeta((x.x - center_.x) / radius_,
                                        (x.y - center_.y) / radius_);
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t k = coeff_.size(); k-- > 0;) acc = (acc + coeff_[k]) * zeta;
        return a0_ + acc.real();
    }

    Vec2 grad(Vec2 x) const override {
        const std::complex<double> zeta((x.x - center_.x) / radius_,
                                        (x.y - center_.y) / radius_);
        std::complex<double> acc{0.0, 0.0};
        for (std::size_t k = coeff_.size(); k-- > 0;)
            acc = acc * zeta + (static_cast<double>(k + 1)) * coeff_[k];
        acc /= radius_;
        return {acc.real(), -acc.imag()};
    }

private:
    Vec2 center_;
    double radius_;
    double a0_;
    std::vector<std::complex<double>> coeff_; // a_k - i b_k
};

} // namespace

// ---------------------------------------------------------------------------
// BoundaryDatum

BoundaryDatum::BoundaryDatum(const Domain& domain, bool uniform)
    : domain_(domain), uniform_(uniform) {}

BoundaryDatum BoundaryDatum::uniform(const Domain& domain) {
    BoundaryDatum d(domain, true);
    // stored as q(t) = f(s(t)) |gamma'(t)| so the primitive is a plain
    // t-antiderivative; uniform datum means f = 2 pi / perimeter
    const int n = 256;
    std::vector<double> q(n);
    for (int j = 0; j < n; ++j)
        q[j] = (kTwoPi / domain.perimeter()) * domain.boundary_velocity(kTwoPi * j / n).norm();
    d.series_ = TrigSeries::fit(q);
    d.series_.a0 = 1.0; // exact circulation by construction
    return d;
}

BoundaryDatum BoundaryDatum::from_table(const Domain& domain,
                                        const std::vector<std::pair<double, double>>& table) {
    if (table.size() < 2) throw ConfigError("datum table needs at least two samples");
    std::vector<std::pair<double, double>> tab = table;
    std::sort(tab.begin(), tab.end());
    const double L = domain.perimeter();
    auto interp = [&](double s) {
        s = std::fmod(s, L);
        if (s < 0.0) s += L;
        auto hi = std::upper_bound(tab.begin(), tab.end(), std::make_pair(s, kInf));
        const auto lo = (hi == tab.begin()) ? std::prev(tab.end()) : std::prev(hi);
        const double s0 = lo->first;
        const double s1 = (hi == tab.end()) ? tab.front().first + L : hi->first;
        const double v1 = (hi == tab.end()) ? tab.front().second : hi->second;
        const double w = (s1 > s0) ? (s - (s0 > s ? s0 - L : s0)) / (s1 - s0) : 0.0;
        return lo->second + w * (v1 - lo->second);
    };
    BoundaryDatum d(domain, false);
    const int n = 512;
    std::vector<double> q(n);
    for (int j = 0; j < n; ++j) {
        const double t = kTwoPi * j / n;
        q[j] = interp(domain.arc_length(t)) * domain.boundary_velocity(t).norm();
    }
    d.series_ = TrigSeries::fit(q);
    if (std::abs(d.series_.a0 - 1.0) > 1e-8)
        throw ConfigError("datum total circulation must be 2 pi");
    d.series_.a0 = 1.0; // snap: keeps the winding bookkeeping exact downstream
    return d;
}

double BoundaryDatum::value(double arc) const {
    const double t = domain_.param_from_arc(arc);
    return series_.eval(t) / domain_.boundary_velocity(t).norm();
}

double BoundaryDatum::primitive(double arc) const {
    return series_.integral0(domain_.param_from_arc(arc));
}

double BoundaryDatum::primitive_param(double t) const { return series_.integral0(t); }

std::vector<double> BoundaryDatum::jump_points(const std::vector<Vec2>& centers) const {
    std::vector<double> jumps;
    jumps.reserve(centers.size());
    for (const Vec2& a : centers)
        jumps.push_back(domain_.nearest_boundary(a).point.arc_parameter);
    return jumps;
}

double BoundaryDatum::g_with_jumps(double arc, const std::vector<double>& jumps) const {
    double g = primitive(arc);
    const double amplitude = kTwoPi / static_cast<double>(jumps.size());
    for (double s : jumps)
        if (arc >= s) g -= amplitude;
    return g;
}

// ---------------------------------------------------------------------------
// DirichletSolver

DirichletSolver::DirichletSolver(const Domain& domain, int resolution)
    : domain_(domain), resolution_(resolution) {
    if (domain.kind() == DomainKind::SmoothCurve)
        bie_ = GreenEngine::boundary_integral(domain, resolution);
}

std::shared_ptr<const Harmonic> DirichletSolver::solve(const std::vector<double>& samples) const {
    if (static_cast<int>(samples.size()) != resolution_)
        throw SolverFailure("boundary sample count must match the solver resolution");
    if (bie_) return bie_->solve_dirichlet(samples);
    return std::make_shared<FourierHarmonic>(domain_.center(), domain_.radius(),
                                             TrigSeries::fit(samples));
}

// ---------------------------------------------------------------------------
// Corrector

std::vector<double> corrector_boundary_samples(const BoundaryDatum& datum,
                                               const std::vector<Vec2>& centers,
                                               int resolution) {
    const Domain& dom = datum.domain();
    const int n = static_cast<int>(centers.size());
    std::vector<double> u(resolution);
    for (int j = 0; j < resolution; ++j)
        u[j] = n * datum.primitive_param(kTwoPi * j / resolution);

    // subtract each unwrapped angle theta_{a_i}; the 2 pi windings cancel the
    // jump content of n g exactly, leaving a continuous periodic trace
    for (const Vec2& a : centers) {
        double prev = 0.0, acc = 0.0;
        for (int j = 0; j <= resolution; ++j) {
            const Vec2 w = dom.boundary_position(kTwoPi * (j % resolution) / resolution) - a;
            const double raw = std::atan2(w.y, w.x);
            if (j == 0) {
                prev = raw;
                acc = raw;
            } else {
                double delta = raw - prev;
                while (delta > kPi) delta -= kTwoPi;
                while (delta <= -kPi) delta += kTwoPi;
                acc += delta;
                prev = raw;
            }
            if (j < resolution) u[j] -= acc;
        }
        // closing the loop must add one full turn (center strictly inside)
        const Vec2 w0 = dom.boundary_position(0.0) - a;
        const double winding = (acc - std::atan2(w0.y, w0.x)) / kTwoPi;
        if (std::abs(winding - 1.0) > 1e-6)
            throw JumpMismatch("boundary trace has a net jump; winding does not cancel");
    }
    return u;
}

std::shared_ptr<const Harmonic> corrector(const DirichletSolver& solver,
                                          const BoundaryDatum& datum,
                                          const std::vector<Vec2>& centers) {
    require_h1(solver.domain());
    for (const Vec2& a : centers)
        if (!solver.domain().contains(a)) throw OutsideDomain("corrector center outside domain");
    for (std::size_t i = 0; i < centers.size(); ++i)
        for (std::size_t j = i + 1; j < centers.size(); ++j)
            if (dist(centers[i], centers[j]) < 1e-12)
                throw CoincidentDislocations("corrector centers must be distinct");
    return solver.solve(corrector_boundary_samples(datum, centers, solver.resolution()));
}

// ---------------------------------------------------------------------------
// Functionals

namespace {

// d_i = min_{j != i} { |a_i - a_j| / 2, dist(a_i, boundary) }
std::vector<double> core_separations(const Domain& dom, const std::vector<Vec2>& centers) {
    std::vector<double> d(centers.size());
    for (std::size_t i = 0; i < centers.size(); ++i) {
        d[i] = dom.nearest_boundary(centers[i]).distance;
        for (std::size_t j = 0; j < centers.size(); ++j)
            if (j != i) d[i] = std::min(d[i], 0.5 * dist(centers[i], centers[j]));
    }
    return d;
}

// +infinity sentinel situations: boundary contact or coincidence
bool sentinel_config(const Domain& dom, const std::vector<Vec2>& centers) {
    for (const Vec2& a : centers) {
        const double sd = dom.signed_boundary_distance(a);
        if (sd < -1e-12) throw OutsideDomain("dislocation outside the closed domain");
        if (sd <= 1e-13) return true;
    }
    for (std::size_t i = 0; i < centers.size(); ++i)
        for (std::size_t j = i + 1; j < centers.size(); ++j)
            if (dist(centers[i], centers[j]) < 1e-12) return true;
    return false;
}

} // namespace

double limit_functional(const DirichletSolver& solver, const BoundaryDatum& datum, Vec2 a,
                        const QuadOpts& opts) {
    require_h1(solver.domain());
    const Domain& dom = solver.domain();
    if (sentinel_config(dom, {a})) return kInf;
    const double d = dom.nearest_boundary(a).distance;
    const auto v = corrector(solver, datum, {a});
    const SingularField K{a};

    const double outer = 0.5 * polar_region_integral(dom, a, d,
                                                     [&](Vec2 x) {
                                                         const Vec2 h = K(x) + v->grad(x);
                                                         return h.norm_sq();
                                                     },
                                                     opts);
    const double inner = 0.5 * annulus_integral(a, 0.0, d,
                                                [&](Vec2 x) { return v->grad(x).norm_sq(); },
                                                opts);
    return kPi * std::log(d) + outer + inner;
}

double limit_functional_n(const DirichletSolver& solver, const BoundaryDatum& datum,
                          const std::vector<Vec2>& centers, const QuadOpts& opts) {
    require_h1(solver.domain());
    const Domain& dom = solver.domain();
    if (sentinel_config(dom, centers)) return kInf;
    const std::vector<double> d = core_separations(dom, centers);
    const auto v = corrector(solver, datum, centers);
    const std::size_t n = centers.size();

    double total = 0.0;
    for (double di : d) total += kPi * std::log(di);

    total += 0.5 * polar_region_integral(dom, dom.center(), 0.0,
                                         [&](Vec2 x) { return v->grad(x).norm_sq(); }, opts);

    for (std::size_t i = 0; i < n; ++i) {
        const SingularField K{centers[i]};
        total += 0.5 * polar_region_integral(dom, centers[i], d[i],
                                             [&](Vec2 x) { return K(x).norm_sq(); }, opts);
        total += polar_region_integral(dom, centers[i], d[i],
                                       [&](Vec2 x) { return v->grad(x).dot(K(x)); }, opts);
    }

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const SingularField Ki{centers[i]}, Kj{centers[j]};
            total += punctured_integral(dom, {centers[i], centers[j]}, {0.0, 0.0},
                                        [&](Vec2 x) { return Ki(x).dot(Kj(x)); }, opts);
        }
    }
    return total;
}

double finite_eps_energy(const DirichletSolver& solver, const BoundaryDatum& datum,
                         const std::vector<Vec2>& centers, double eps, const QuadOpts& opts) {
    require_h1(solver.domain());
    const Domain& dom = solver.domain();
    if (sentinel_config(dom, centers))
        throw CoreOverlap("finite-eps energy needs interior, distinct centers");
    const std::vector<double> d = core_separations(dom, centers);
    if (!(eps < *std::min_element(d.begin(), d.end())))
        throw CoreOverlap("eps must be below the minimal core separation");
    const auto v = corrector(solver, datum, centers);

    auto field_sq = [&](Vec2 x) {
        Vec2 h = v->grad(x);
        for (const Vec2& a : centers) h += SingularField{a}(x);
        return h.norm_sq();
    };

    if (centers.size() == 1) {
        // exact decomposition: graded annulus around the core plus the star
        // region beyond the inscribed ball
        const Vec2 a = centers[0];
        return 0.5 * annulus_integral(a, eps, d[0], field_sq, opts) +
               0.5 * polar_region_integral(dom, a, d[0], field_sq, opts);
    }
    // the cutoff transition of the punctured integrator needs clearance above
    // the holes: 1.35 eps < 0.95 * 0.9 * d_i
    if (!(eps < 0.633 * *std::min_element(d.begin(), d.end())))
        throw CoreOverlap("eps too close to the core separation for the cutoff transition");
    const std::vector<double> holes(centers.size(), eps);
    return 0.5 * punctured_integral(dom, centers, holes, field_sq, opts);
}

double renormalized_finite_eps(const DirichletSolver& solver, const BoundaryDatum& datum,
                               const std::vector<Vec2>& centers, double eps,
                               const QuadOpts& opts) {
    const double e = finite_eps_energy(solver, datum, centers, eps, opts);
    return e - kPi * static_cast<double>(centers.size()) * std::abs(std::log(eps));
}

double interaction_cross_term(const DirichletSolver& solver, const BoundaryDatum& datum,
                              Vec2 ai, Vec2 aj, const QuadOpts& opts) {
    const auto vi = corrector(solver, datum, {ai});
    const auto vj = corrector(solver, datum, {aj});
    const SingularField Ki{ai}, Kj{aj};
    return punctured_integral(solver.domain(), {ai, aj}, {0.0, 0.0},
                              [&](Vec2 x) {
                                  const Vec2 hi = Ki(x) + vi->grad(x);
                                  const Vec2 hj = Kj(x) + vj->grad(x);
                                  return hi.dot(hj);
                              },
                              opts);
}

} // namespace dislocore

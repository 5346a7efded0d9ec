#include "dislocore/minimize.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "dislocore/errors.hpp"

namespace dislocore {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double halton(int index, int base) {
    double f = 1.0, r = 0.0;
    while (index > 0) {
        f /= base;
        r += f * (index % base);
        index /= base;
    }
    return r;
}

constexpr int kHaltonBases[] = {2, 3, 5, 7, 11, 13, 17, 19};

using Objective = std::function<double(const std::vector<Vec2>&)>;

double guarded_eval(const Objective& f, const std::vector<Vec2>& x) {
    try {
        const double v = f(x);
        return std::isfinite(v) ? v : kInf;
    } catch (const Error&) {
        return kInf;
    }
}

std::vector<Vec2> canonical_sort(std::vector<Vec2> pts) {
    std::sort(pts.begin(), pts.end(), [](Vec2 a, Vec2 b) {
        return a.x != b.x ? a.x < b.x : a.y < b.y;
    });
    return pts;
}

bool lex_less(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        if (a[i].x != b[i].x) return a[i].x < b[i].x;
        if (a[i].y != b[i].y) return a[i].y < b[i].y;
    }
    return a.size() < b.size();
}

double interior_margin(const Domain& dom, const std::vector<Vec2>& pts) {
    double m = kInf;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        m = std::min(m, dom.signed_boundary_distance(pts[i]));
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            m = std::min(m, 0.5 * dist(pts[i], pts[j]));
    }
    return m;
}

struct Descent {
    std::vector<Vec2> endpoint;
    double value = kInf;
    int iterations = 0;
    int accepted_steps = 0;
    bool converged = false;
    std::vector<double> trace;
};

Descent descend(const Domain& dom, const Objective& f, std::vector<Vec2> x,
                const MinimizeOpts& opts) {
    Descent out;
    const double fd = opts.fd_step_fraction * dom.diameter();
    double value = guarded_eval(f, x);
    out.trace.push_back(value);
    if (!std::isfinite(value)) {
        out.endpoint = x;
        return out;
    }
    double alpha = 0.05 * dom.diameter();

    for (int iter = 0; iter < opts.max_iters; ++iter) {
        out.iterations = iter + 1;
        // central finite-difference gradient; one-sided fallback at sentinels
        std::vector<Vec2> grad(x.size());
        double gnorm_sq = 0.0;
        bool grad_ok = true;
        for (std::size_t i = 0; i < x.size() && grad_ok; ++i) {
            for (int c = 0; c < 2; ++c) {
                std::vector<Vec2> xp = x, xm = x;
                (c == 0 ? xp[i].x : xp[i].y) += fd;
                (c == 0 ? xm[i].x : xm[i].y) -= fd;
                const double fp = guarded_eval(f, xp), fm = guarded_eval(f, xm);
                double g;
                if (std::isfinite(fp) && std::isfinite(fm)) {
                    g = (fp - fm) / (2.0 * fd);
                } else if (std::isfinite(fp)) {
                    g = (fp - value) / fd;
                } else if (std::isfinite(fm)) {
                    g = (value - fm) / fd;
                } else {
                    grad_ok = false;
                    break;
                }
                (c == 0 ? grad[i].x : grad[i].y) = g;
            }
        }
        if (!grad_ok) break;
        for (const Vec2& g : grad) gnorm_sq += g.norm_sq();
        const double gnorm = std::sqrt(gnorm_sq);
        if (gnorm < opts.grad_tol) {
            out.converged = true;
            break;
        }

        // backtracking with Armijo decrease; sentinel regions simply reject
        bool accepted = false;
        double a = alpha;
        for (int bt = 0; bt < 40; ++bt) {
            std::vector<Vec2> trial = x;
            for (std::size_t i = 0; i < x.size(); ++i) trial[i] -= (a / gnorm) * grad[i];
            const double ft = guarded_eval(f, trial);
            if (std::isfinite(ft) && ft <= value - 1e-4 * a * gnorm) {
                x = std::move(trial);
                value = ft;
                out.trace.push_back(value);
                alpha = std::min(2.0 * a, 0.25 * dom.diameter());
                accepted = true;
                ++out.accepted_steps;
                break;
            }
            a *= 0.5;
        }
        if (!accepted) break; // no descent at line-search resolution
    }
    out.endpoint = std::move(x);
    out.value = value;
    return out;
}

std::vector<std::vector<Vec2>> make_starts(const Domain& dom, int n, int starts) {
    // low-discrepancy tuples over the bounding box, rejected to the interior
    // with a diameter-relative margin
    const double margin = 0.04 * dom.diameter();
    const Vec2 c = dom.center();
    const double half = 0.55 * dom.diameter();
    std::vector<std::vector<Vec2>> out;
    int index = 1;
    while (static_cast<int>(out.size()) < starts && index < 100000) {
        std::vector<Vec2> tuple(n);
        bool ok = true;
        for (int i = 0; i < n && ok; ++i) {
            const double u = halton(index, kHaltonBases[(2 * i) % 8]);
            const double v = halton(index, kHaltonBases[(2 * i + 1) % 8]);
            tuple[i] = {c.x + half * (2.0 * u - 1.0), c.y + half * (2.0 * v - 1.0)};
            if (!dom.contains(tuple[i]) ||
                dom.signed_boundary_distance(tuple[i]) < margin)
                ok = false;
        }
        for (int i = 0; i < n && ok; ++i)
            for (int j = i + 1; j < n; ++j)
                if (dist(tuple[i], tuple[j]) < margin) ok = false;
        if (ok) out.push_back(std::move(tuple));
        ++index;
    }
    if (out.empty()) throw AllStartsDiverged("could not place any admissible start");
    return out;
}

} // namespace

MinimizationReport minimize_objective(const Domain& domain, const Objective& objective,
                                      int n, const MinimizeOpts& opts) {
    const auto starts = make_starts(domain, n, opts.starts);
    std::vector<Descent> results(starts.size());
    if (opts.parallel_starts) {
        std::vector<std::future<Descent>> futs;
        futs.reserve(starts.size());
        for (const auto& s : starts)
            futs.push_back(std::async(std::launch::async, [&, s] {
                return descend(domain, objective, s, opts);
            }));
        for (std::size_t i = 0; i < futs.size(); ++i) results[i] = futs[i].get();
    } else {
        for (std::size_t i = 0; i < starts.size(); ++i)
            results[i] = descend(domain, objective, starts[i], opts);
    }

    MinimizationReport rep;
    int best = -1;
    bool any_progress = false;
    for (std::size_t i = 0; i < results.size(); ++i) {
        if (!std::isfinite(results[i].value)) continue;
        if (results[i].accepted_steps > 0 || results[i].converged) any_progress = true;
        rep.start_values.push_back(results[i].value);
        ++rep.starts_used;
        if (best < 0 || results[i].value < results[best].value ||
            (results[i].value == results[best].value &&
             lex_less(canonical_sort(results[i].endpoint),
                      canonical_sort(results[best].endpoint)))) {
            best = static_cast<int>(i);
        }
    }
    if (best < 0) throw AllStartsDiverged("every start ended in a sentinel region");
    if (!any_progress)
        throw NoDescentDirection("no start accepted a descent step at line-search resolution");
    rep.argmin = canonical_sort(results[best].endpoint);
    rep.value = results[best].value;
    rep.iterations = results[best].iterations;
    rep.converged = results[best].converged;
    rep.trace = results[best].trace;
    rep.interior_margin = interior_margin(domain, rep.argmin);
    return rep;
}

MinimizationReport minimize_limit(const DirichletSolver& solver, const BoundaryDatum& datum,
                                  int n, const MinimizeOpts& opts) {
    auto objective = [&](const std::vector<Vec2>& pts) {
        return n == 1 ? limit_functional(solver, datum, pts[0], opts.quadrature)
                      : limit_functional_n(solver, datum, pts, opts.quadrature);
    };
    return minimize_objective(solver.domain(), objective, n, opts);
}

MinimizationReport minimize_finite_eps(const DirichletSolver& solver,
                                       const BoundaryDatum& datum, int n, double eps,
                                       const MinimizeOpts& opts) {
    auto objective = [&](const std::vector<Vec2>& pts) {
        return renormalized_finite_eps(solver, datum, pts, eps, opts.quadrature);
    };
    return minimize_objective(solver.domain(), objective, n, opts);
}

SweepReport confinement_sweep(const DirichletSolver& solver, const BoundaryDatum& datum,
                              int n, const std::vector<double>& eps_list,
                              const MinimizeOpts& opts) {
    SweepReport rep;
    rep.limit = minimize_limit(solver, datum, n, opts);
    for (double eps : eps_list) {
        MinimizationReport m = minimize_finite_eps(solver, datum, n, eps, opts);
        SweepRow row;
        row.eps = eps;
        row.argmin = m.argmin;
        row.value = m.value;
        row.interior_margin = m.interior_margin;
        row.gap_to_limit = std::abs(m.value - rep.limit.value);
        double drift = 0.0;
        for (std::size_t i = 0; i < m.argmin.size(); ++i)
            drift = std::max(drift, dist(m.argmin[i], rep.limit.argmin[i]));
        row.drift_to_limit = drift;
        rep.rows.push_back(std::move(row));
    }
    double smallest_eps = kInf;
    double margin_at_smallest = 0.0;
    for (const SweepRow& r : rep.rows) {
        if (r.eps < smallest_eps) {
            smallest_eps = r.eps;
            margin_at_smallest = r.interior_margin;
        }
    }
    rep.margin_floor = 0.8 * margin_at_smallest;
    rep.margin_uniform = true;
    for (const SweepRow& r : rep.rows)
        if (r.interior_margin < rep.margin_floor) rep.margin_uniform = false;
    rep.gaps_decreasing = true;
    // compare along decreasing eps
    std::vector<SweepRow> sorted = rep.rows;
    std::sort(sorted.begin(), sorted.end(),
              [](const SweepRow& a, const SweepRow& b) { return a.eps > b.eps; });
    for (std::size_t i = 1; i < sorted.size(); ++i)
        if (sorted[i].gap_to_limit > sorted[i - 1].gap_to_limit) rep.gaps_decreasing = false;
    return rep;
}

} // namespace dislocore

#pragma once

#include <functional>
#include <vector>

#include "dislocore/dirichlet.hpp"
#include "dislocore/quadrature.hpp"
#include "dislocore/vec2.hpp"

namespace dislocore {

struct MinimizeOpts {
    int starts = 16;
    int max_iters = 200;
    double grad_tol = 1e-3;
    double fd_step_fraction = 1e-5; // finite-difference step, relative to diam
    QuadOpts quadrature = QuadOpts::fast();
    bool parallel_starts = true;
};

struct MinimizationReport {
    std::vector<Vec2> argmin; // canonicalized by lexicographic sort
    double value = 0.0;
    int iterations = 0;  // of the winning descent
    int starts_used = 0; // descents that produced a finite endpoint
    double interior_margin = 0.0; // min_i d_i at the argmin
    std::vector<double> trace;    // objective values along the winning descent
    std::vector<double> start_values; // endpoint value per start (finite ones)
    bool converged = false;           // gradient criterion met on the winner
};

/// Multistart projected gradient descent with backtracking line search on the
/// limit functional (F for n = 1, the n-tuple functional otherwise); gradients
/// by central finite differences, starts from a deterministic low-discrepancy
/// sequence, +infinity sentinel regions handled by step rejection.
MinimizationReport minimize_limit(const DirichletSolver& solver, const BoundaryDatum& datum,
                                  int n, const MinimizeOpts& opts = {});

/// Same optimizer on the finite-core functional F_eps.
MinimizationReport minimize_finite_eps(const DirichletSolver& solver,
                                       const BoundaryDatum& datum, int n, double eps,
                                       const MinimizeOpts& opts = {});

struct SweepRow {
    double eps = 0.0;
    std::vector<Vec2> argmin;
    double value = 0.0;          // F_eps at its argmin
    double interior_margin = 0.0;
    double gap_to_limit = 0.0;   // |F_eps(a_eps) - F(a*)|
    double drift_to_limit = 0.0; // max_i |a_eps_i - a*_i| after canonical sort
};

struct SweepReport {
    MinimizationReport limit;
    std::vector<SweepRow> rows; // ordered as the given eps list
    double margin_floor = 0.0;  // 0.8 * margin at the smallest eps
    bool margin_uniform = false; // every row margin >= margin_floor
    bool gaps_decreasing = false;
};

/// Minimizes F_eps along the eps list and reports interior margins against
/// the uniformity proxy margin(eps) >= 0.8 * margin(smallest eps).
SweepReport confinement_sweep(const DirichletSolver& solver, const BoundaryDatum& datum,
                              int n, const std::vector<double>& eps_list,
                              const MinimizeOpts& opts = {});

/// Deterministic multistart driver for an arbitrary objective on n-tuples of
/// interior points (exposed for tests).
MinimizationReport minimize_objective(
    const Domain& domain, const std::function<double(const std::vector<Vec2>&)>& objective,
    int n, const MinimizeOpts& opts);

} // namespace dislocore

#pragma once

#include <functional>
#include <memory>

#include "dislocore/geometry.hpp"
#include "dislocore/harmonic.hpp"
#include "dislocore/vec2.hpp"

namespace dislocore {

enum class GreenBackend { ImageForm, BoundaryIntegral };

/// Evaluator for the Dirichlet Green's function G, its regular part k, the
/// Robin function h(x) = k(x,x), and their gradients on a fixed domain.
///
/// Backends: closed-form reflection across the circle (disks), or a Nystrom
/// double-layer boundary-integral solver (general smooth domains; the dense
/// boundary operator is factorized once at construction). Engines are
/// immutable and cheap to copy; evaluations are pure.
class GreenEngine {
public:
    static GreenEngine image_form(const Domain& domain); // disks only
    static GreenEngine boundary_integral(const Domain& domain, int panels = 256);
    /// Image form for disks, boundary integral otherwise.
    static GreenEngine make(const Domain& domain, int panels = 256);

    GreenBackend backend() const;
    const Domain& domain() const;
    int panels() const;

    double green(Vec2 x, Vec2 y) const;
    double regular_part(Vec2 x, Vec2 y) const;
    double robin(Vec2 x) const;
    Vec2 grad_regular(Vec2 x, Vec2 y) const; // gradient in the first argument
    Vec2 grad_robin(Vec2 x) const;
    Vec2 grad_green(Vec2 x, Vec2 y) const; // gradient in the first argument

    /// -lap(h)(x) - (2/pi) exp(-4 pi h(x)) with a 5-point stencil Laplacian;
    /// vanishes as the step goes to zero.
    double liouville_residual(Vec2 x, double stencil_step) const;

    /// Laplace Dirichlet solve with arbitrary boundary data (by parameter t).
    /// Boundary-integral backend only; reuses the factorized operator.
    std::shared_ptr<const Harmonic> solve_dirichlet(const std::function<double(double)>& data) const;
    /// Same, with the data already sampled at the panels() Nystrom nodes.
    std::shared_ptr<const Harmonic> solve_dirichlet(const std::vector<double>& samples) const;

private:
    struct Impl;
    explicit GreenEngine(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

} // namespace dislocore

#include "dislocore/green.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dislocore/errors.hpp"

namespace dislocore {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kFineFactor = 8; // density upsampling for near-boundary targets

// Double-layer kernel for the Laplace fundamental solution -(1/2pi) log r:
//   D(x; y, nu) = -(1/2pi) (y - x) . nu / |y - x|^2
double dl_kernel(Vec2 x, Vec2 y, Vec2 nu) {
    const Vec2 q = y - x;
    return -(q.dot(nu)) / (kTwoPi * q.norm_sq());
}

Vec2 dl_kernel_grad(Vec2 x, Vec2 y, Vec2 nu) {
    const Vec2 q = y - x;
    const double r2 = q.norm_sq();
    return (nu / r2 - q * (2.0 * q.dot(nu) / (r2 * r2))) / kTwoPi;
}

} // namespace

struct GreenEngine::Impl {
    Domain dom;
    GreenBackend backend;
    int n = 0;

    explicit Impl(Domain d, GreenBackend b) : dom(std::move(d)), backend(b) {}

    // Nystrom node data (boundary-integral backend)
    std::vector<Vec2> pos, nrm;
    std::vector<double> jac;
    std::vector<Vec2> fpos, fnrm; // fine grid for near-boundary evaluation
    std::vector<double> fjac;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu;
    double panel_width = 0.0;

    struct Density {
        std::vector<double> phi;      // at coarse nodes
        std::vector<double> phi_fine; // upsampled by trigonometric interpolation
    };

    // --- image closed forms (disk center c, radius R) -----------------------

    double k_image(Vec2 x, Vec2 y) const {
        const Vec2 u = y - dom.center(), v = x - dom.center();
        const double R2 = dom.radius() * dom.radius();
        const double s = u.norm_sq() * v.norm_sq() - 2.0 * R2 * u.dot(v) + R2 * R2;
        return std::log(s / R2) / (4.0 * kPi);
    }

    Vec2 grad_k_image(Vec2 x, Vec2 y) const {
        const Vec2 u = y - dom.center(), v = x - dom.center();
        const double R2 = dom.radius() * dom.radius();
        const double s = u.norm_sq() * v.norm_sq() - 2.0 * R2 * u.dot(v) + R2 * R2;
        return (v * u.norm_sq() - u * R2) / (kTwoPi * s);
    }

    double h_image(Vec2 x) const {
        const Vec2 v = x - dom.center();
        const double R = dom.radius();
        return std::log((R * R - v.norm_sq()) / R) / kTwoPi;
    }

    Vec2 grad_h_image(Vec2 x) const {
        const Vec2 v = x - dom.center();
        const double R2 = dom.radius() * dom.radius();
        return -v / (kPi * (R2 - v.norm_sq()));
    }

    // --- Nystrom machinery ---------------------------------------------------

    void build_bie(int panels) {
        n = panels;
        pos.resize(n);
        nrm.resize(n);
        jac.resize(n);
        std::vector<double> curv(n);
        for (int j = 0; j < n; ++j) {
            const double t = kTwoPi * j / n;
            const BoundaryPoint bp = dom.boundary_point(t);
            pos[j] = bp.position;
            nrm[j] = bp.outward_normal;
            curv[j] = bp.curvature;
            // |gamma'(t)|: recover from the arc-length rate via curvature-free route
            jac[j] = boundary_speed(t);
        }
        panel_width = dom.perimeter() / n;

        Eigen::MatrixXd A(n, n);
        const double w = kTwoPi / n;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                const double kern = (i == j) ? -curv[i] / (4.0 * kPi) : dl_kernel(pos[i], pos[j], nrm[j]);
                A(i, j) = w * jac[j] * kern;
            }
            A(i, i) += -0.5;
        }
        lu.compute(A);
        if (!lu.matrixLU().allFinite()) throw SolverFailure("boundary operator factorization failed");

        const int fn = kFineFactor * n;
        fpos.resize(fn);
        fnrm.resize(fn);
        fjac.resize(fn);
        for (int j = 0; j < fn; ++j) {
            const double t = kTwoPi * j / fn;
            const BoundaryPoint bp = dom.boundary_point(t);
            fpos[j] = bp.position;
            fnrm[j] = bp.outward_normal;
            fjac[j] = boundary_speed(t);
        }
    }

    double boundary_speed(double t) const { return dom.boundary_velocity(t).norm(); }

    Density make_density(const std::vector<double>& data) const {
        Density d;
        Eigen::VectorXd rhs(n);
        for (int i = 0; i < n; ++i) rhs(i) = data[i];
        const Eigen::VectorXd phi = lu.solve(rhs);
        if (!phi.allFinite()) throw SolverFailure("boundary system solve produced non-finite density");
        d.phi.assign(phi.data(), phi.data() + n);
        const TrigSeries interp = TrigSeries::fit(d.phi);
        const int fn = kFineFactor * n;
        d.phi_fine.resize(fn);
        for (int j = 0; j < fn; ++j) d.phi_fine[j] = interp.eval(kTwoPi * j / fn);
        return d;
    }

    bool near_boundary(Vec2 x) const {
        // switch to the upsampled rule while the plain one is still accurate;
        // kernel gradients lose accuracy earlier than values
        double dmin = std::numeric_limits<double>::infinity();
        for (const Vec2& p : pos) dmin = std::min(dmin, (p - x).norm_sq());
        return std::sqrt(dmin) < 4.5 * panel_width;
    }

    double dl_value(const Density& d, Vec2 x) const {
        if (near_boundary(x)) {
            const int fn = static_cast<int>(fpos.size());
            const double w = kTwoPi / fn;
            double acc = 0.0;
            for (int j = 0; j < fn; ++j)
                acc += w * fjac[j] * d.phi_fine[j] * dl_kernel(x, fpos[j], fnrm[j]);
            return acc;
        }
        const double w = kTwoPi / n;
        double acc = 0.0;
        for (int j = 0; j < n; ++j) acc += w * jac[j] * d.phi[j] * dl_kernel(x, pos[j], nrm[j]);
        return acc;
    }

    Vec2 dl_grad(const Density& d, Vec2 x) const {
        Vec2 acc{};
        if (near_boundary(x)) {
            const int fn = static_cast<int>(fpos.size());
            const double w = kTwoPi / fn;
            for (int j = 0; j < fn; ++j)
                acc += (w * fjac[j] * d.phi_fine[j]) * dl_kernel_grad(x, fpos[j], fnrm[j]);
            return acc;
        }
        const double w = kTwoPi / n;
        for (int j = 0; j < n; ++j)
            acc += (w * jac[j] * d.phi[j]) * dl_kernel_grad(x, pos[j], nrm[j]);
        return acc;
    }

    // Density for k(., y), cached per thread on the most recent y.
    std::shared_ptr<const Density> density_for(Vec2 y) const {
        struct Slot {
            const Impl* impl = nullptr;
            Vec2 y{};
            std::shared_ptr<const Density> d;
        };
        static thread_local Slot slot;
        if (slot.impl == this && slot.y == y && slot.d) return slot.d;
        std::vector<double> data(n);
        for (int i = 0; i < n; ++i) data[i] = std::log(dist(pos[i], y)) / kTwoPi;
        auto d = std::make_shared<Density>(make_density(data));
        slot = {this, y, d};
        return d;
    }

    void require_inside(Vec2 p, const char* who) const {
        if (!dom.contains(p)) throw OutsideDomain(who);
    }

    class DirichletHarmonic final : public Harmonic {
    public:
        DirichletHarmonic(std::shared_ptr<const Impl> impl, Density d)
            : impl_(std::move(impl)), density_(std::move(d)) {}
        double value(Vec2 x) const override { return impl_->dl_value(density_, x); }
        Vec2 grad(Vec2 x) const override { return impl_->dl_grad(density_, x); }

    private:
        std::shared_ptr<const Impl> impl_;
        Density density_;
    };
};

GreenEngine GreenEngine::image_form(const Domain& domain) {
    if (domain.kind() == DomainKind::SmoothCurve)
        throw SolverFailure("image-form backend requires a disk domain");
    return GreenEngine(std::make_shared<Impl>(domain, GreenBackend::ImageForm));
}

GreenEngine GreenEngine::boundary_integral(const Domain& domain, int panels) {
    auto impl = std::make_shared<Impl>(domain, GreenBackend::BoundaryIntegral);
    impl->build_bie(panels);
    return GreenEngine(std::move(impl));
}

GreenEngine GreenEngine::make(const Domain& domain, int panels) {
    if (domain.kind() == DomainKind::SmoothCurve) return boundary_integral(domain, panels);
    return image_form(domain);
}

GreenBackend GreenEngine::backend() const { return impl_->backend; }
const Domain& GreenEngine::domain() const { return impl_->dom; }
int GreenEngine::panels() const { return impl_->n; }

double GreenEngine::regular_part(Vec2 x, Vec2 y) const {
    impl_->require_inside(x, "regular_part: x outside domain");
    impl_->require_inside(y, "regular_part: y outside domain");
    if (impl_->backend == GreenBackend::ImageForm) return impl_->k_image(x, y);
    return impl_->dl_value(*impl_->density_for(y), x);
}

double GreenEngine::robin(Vec2 x) const {
    impl_->require_inside(x, "robin: x outside domain");
    if (impl_->backend == GreenBackend::ImageForm) return impl_->h_image(x);
    return impl_->dl_value(*impl_->density_for(x), x);
}

Vec2 GreenEngine::grad_regular(Vec2 x, Vec2 y) const {
    impl_->require_inside(x, "grad_regular: x outside domain");
    impl_->require_inside(y, "grad_regular: y outside domain");
    if (impl_->backend == GreenBackend::ImageForm) return impl_->grad_k_image(x, y);
    return impl_->dl_grad(*impl_->density_for(y), x);
}

Vec2 GreenEngine::grad_robin(Vec2 x) const {
    impl_->require_inside(x, "grad_robin: x outside domain");
    if (impl_->backend == GreenBackend::ImageForm) return impl_->grad_h_image(x);
    // h(x) = k(x,x) and k is symmetric, so grad h = 2 grad_1 k(x,x).
    return 2.0 * impl_->dl_grad(*impl_->density_for(x), x);
}

double GreenEngine::green(Vec2 x, Vec2 y) const {
    return -std::log(dist(x, y)) / kTwoPi + regular_part(x, y);
}

Vec2 GreenEngine::grad_green(Vec2 x, Vec2 y) const {
    const Vec2 q = x - y;
    return q * (-1.0 / (kTwoPi * q.norm_sq())) + grad_regular(x, y);
}

double GreenEngine::liouville_residual(Vec2 x, double stencil_step) const {
    const double s = stencil_step;
    if (impl_->dom.nearest_boundary(x).distance <= 2.0 * s)
        throw StencilOutsideDomain("liouville_residual stencil too close to the boundary");
    const double hc = robin(x);
    const double lap = (robin({x.x + s, x.y}) + robin({x.x - s, x.y}) + robin({x.x, x.y + s}) +
                        robin({x.x, x.y - s}) - 4.0 * hc) /
                       (s * s);
    return -lap - (2.0 / kPi) * std::exp(-4.0 * kPi * hc);
}

std::shared_ptr<const Harmonic> GreenEngine::solve_dirichlet(
    const std::function<double(double)>& data) const {
    if (impl_->backend != GreenBackend::BoundaryIntegral)
        throw SolverFailure("solve_dirichlet requires the boundary-integral backend");
    std::vector<double> g(impl_->n);
    for (int i = 0; i < impl_->n; ++i) g[i] = data(kTwoPi * i / impl_->n);
    return solve_dirichlet(g);
}

std::shared_ptr<const Harmonic> GreenEngine::solve_dirichlet(
    const std::vector<double>& samples) const {
    if (impl_->backend != GreenBackend::BoundaryIntegral)
        throw SolverFailure("solve_dirichlet requires the boundary-integral backend");
    if (static_cast<int>(samples.size()) != impl_->n)
        throw SolverFailure("boundary data sample count must match the panel count");
    return std::make_shared<Impl::DirichletHarmonic>(impl_, impl_->make_density(samples));
}

} // namespace dislocore

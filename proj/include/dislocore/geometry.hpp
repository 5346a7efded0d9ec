#pragma once

#include <memory>
#include <vector>

#include "dislocore/errors.hpp"
#include "dislocore/vec2.hpp"

namespace dislocore {

enum class DomainKind { UnitDisk, Disk, SmoothCurve };

struct BoundaryPoint {
    Vec2 position;
    double arc_parameter = 0.0; // arc length from the parametrization origin
    Vec2 outward_normal;
    Vec2 tangent; // counterclockwise orientation
    double curvature = 0.0;
};

struct BoundaryProjection {
    double distance = 0.0;
    BoundaryPoint point;
    bool ambiguous = false; // nearest point not unique; a deterministic representative is returned
};

/// Real trigonometric polynomial fitted to uniform samples on [0, 2pi).
struct TrigSeries {
    double a0 = 0.0;
    std::vector<double> a; // cos coefficients, k = 1..M
    std::vector<double> b; // sin coefficients, k = 1..M

    static TrigSeries fit(const std::vector<double>& samples);
    double eval(double t) const;
    double deriv(double t) const;
    double deriv2(double t) const;
    // definite integral over [0, t] (includes the linear a0*t part)
    double integral0(double t) const;
};

/// Closed C^2 planar cross-section with boundary geometry queries.
///
/// Boundary parametrization t in [0, 2pi), counterclockwise; the interior
/// lies on the left of the tangent. Immutable after construction.
class Domain {
public:
    static Domain unit_disk();
    static Domain disk(Vec2 center, double radius);
    static Domain smooth_curve(std::vector<Vec2> samples, bool convex);
    static Domain ellipse(double semi_x, double semi_y, int samples = 256, Vec2 center = {});

    DomainKind kind() const { return kind_; }
    bool convex() const { return convex_; }
    Vec2 center() const { return center_; } // disk center, or sample centroid (interior anchor)
    double radius() const;                  // disks only
    int sample_count() const { return static_cast<int>(samples_.size()); }

    double perimeter() const { return perimeter_; }
    double diameter() const { return diameter_; }
    /// Largest radius of interior/exterior tangent disks (rho_bar). For sampled
    /// curves this is a discrete estimate; its resolution is sample-limited.
    double uniform_disk_radius() const { return rho_bar_; }

    bool contains(Vec2 p) const;
    /// Distance and nearest boundary point for an interior point.
    BoundaryProjection nearest_boundary(Vec2 p) const;
    /// Distance to the boundary, positive inside and negative outside.
    double signed_boundary_distance(Vec2 p) const;

    Vec2 boundary_position(double t) const;
    Vec2 boundary_velocity(double t) const; // d gamma / dt
    BoundaryPoint boundary_point(double t) const;
    double arc_length(double t) const;
    double param_from_arc(double s) const;

    /// Distance from interior point p to the boundary along direction angle phi.
    /// Requires the domain star-shaped about p (always true for disks and convex domains).
    double radial_extent(Vec2 p, double phi) const;

private:
    Domain() = default;

    DomainKind kind_ = DomainKind::UnitDisk;
    bool convex_ = true;
    Vec2 center_{};
    double radius_ = 1.0;

    // SmoothCurve state
    std::vector<Vec2> samples_;
    TrigSeries cx_, cy_;       // coordinate series
    TrigSeries speed_;         // |gamma'(t)|
    double perimeter_ = 0.0;
    double diameter_ = 0.0;
    double rho_bar_ = 1.0;

    void finalize_curve();
    double newton_project(Vec2 p, double t0) const;
    bool inside_curve(Vec2 p) const;
};

/// Minimal separation d_n: distance to the boundary for n = 1, otherwise the
/// minimum of all boundary distances and pairwise distances.
double separation(const std::vector<Vec2>& positions, const Domain& domain);

/// Membership in D_{n,delta,gamma}: first position within delta of the
/// boundary, the remaining tail gamma-separated (from the boundary and
/// mutually). Throws ParameterOrder unless delta < gamma.
bool in_region_D(const Domain& domain, const std::vector<Vec2>& positions,
                 double delta, double gamma);

/// Membership in C_{n,zeta,eta}: first two positions within zeta of each
/// other, the tail eta-separated, and the pair at distance greater than eta
/// from the tail and from the boundary. Throws ParameterOrder unless zeta < eta.
bool in_region_C(const Domain& domain, const std::vector<Vec2>& positions,
                 double zeta, double eta);

} // namespace dislocore

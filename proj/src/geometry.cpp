#include "dislocore/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace dislocore {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_2pi(double t) {
    t = std::fmod(t, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    return t;
}

} // namespace

// ---------------------------------------------------------------------------
// TrigSeries

TrigSeries TrigSeries::fit(const std::vector<double>& samples) {
    const int n = static_cast<int>(samples.size());
    const int m = n / 2;
    TrigSeries s;
    s.a.assign(m, 0.0);
    s.b.assign(m, 0.0);
    for (int j = 0; j < n; ++j) s.a0 += samples[j];
    s.a0 /= n;
    for (int k = 1; k <= m; ++k) {
        double ca = 0.0, cb = 0.0;
        for (int j = 0; j < n; ++j) {
            const double ang = k * kTwoPi * j / n;
            ca += samples[j] * std::cos(ang);
            cb += samples[j] * std::sin(ang);
        }
        // Nyquist mode (k = n/2, even n) carries half weight and no sine part.
        const bool nyquist = (2 * k == n);
        s.a[k - 1] = (nyquist ? 1.0 : 2.0) * ca / n;
        s.b[k - 1] = nyquist ? 0.0 : 2.0 * cb / n;
    }
    return s;
}

double TrigSeries::eval(double t) const {
    double r = a0;
    const double c1 = std::cos(t), s1 = std::sin(t);
    double ck = 1.0, sk = 0.0; // cos(k t), sin(k t) via rotation recurrence
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double c = ck * c1 - sk * s1;
        const double sn = sk * c1 + ck * s1;
        ck = c;
        sk = sn;
        r += a[k] * ck + b[k] * sk;
    }
    return r;
}

double TrigSeries::deriv(double t) const {
    double r = 0.0;
    const double c1 = std::cos(t), s1 = std::sin(t);
    double ck = 1.0, sk = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double c = ck * c1 - sk * s1;
        const double sn = sk * c1 + ck * s1;
        ck = c;
        sk = sn;
        const double kk = static_cast<double>(k + 1);
        r += kk * (-a[k] * sk + b[k] * ck);
    }
    return r;
}

double TrigSeries::deriv2(double t) const {
    double r = 0.0;
    const double c1 = std::cos(t), s1 = std::sin(t);
    double ck = 1.0, sk = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double c = ck * c1 - sk * s1;
        const double sn = sk * c1 + ck * s1;
        ck = c;
        sk = sn;
        const double kk = static_cast<double>(k + 1);
        r -= kk * kk * (a[k] * ck + b[k] * sk);
    }
    return r;
}

double TrigSeries::integral0(double t) const {
    double r = a0 * t;
    const double c1 = std::cos(t), s1 = std::sin(t);
    double ck = 1.0, sk = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double c = ck * c1 - sk * s1;
        const double sn = sk * c1 + ck * s1;
        ck = c;
        sk = sn;
        const double kk = static_cast<double>(k + 1);
        r += (a[k] * sk - b[k] * (ck - 1.0)) / kk;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Domain construction

Domain Domain::unit_disk() {
    Domain d;
    d.kind_ = DomainKind::UnitDisk;
    d.convex_ = true;
    d.center_ = {0.0, 0.0};
    d.radius_ = 1.0;
    d.perimeter_ = kTwoPi;
    d.diameter_ = 2.0;
    d.rho_bar_ = 1.0;
    return d;
}

Domain Domain::disk(Vec2 center, double radius) {
    if (!(radius > 0.0)) throw DegenerateBoundary("disk radius must be positive");
    Domain d;
    d.kind_ = DomainKind::Disk;
    d.convex_ = true;
    d.center_ = center;
    d.radius_ = radius;
    d.perimeter_ = kTwoPi * radius;
    d.diameter_ = 2.0 * radius;
    d.rho_bar_ = radius;
    return d;
}

Domain Domain::smooth_curve(std::vector<Vec2> samples, bool convex) {
    if (samples.size() < 16) throw DegenerateBoundary("need at least 16 boundary samples");
    Domain d;
    d.kind_ = DomainKind::SmoothCurve;
    d.convex_ = convex;
    d.samples_ = std::move(samples);
    d.finalize_curve();
    return d;
}

Domain Domain::ellipse(double semi_x, double semi_y, int samples, Vec2 center) {
    if (!(semi_x > 0.0) || !(semi_y > 0.0)) throw DegenerateBoundary("ellipse semi-axes must be positive");
    std::vector<Vec2> pts(samples);
    for (int j = 0; j < samples; ++j) {
        const double t = kTwoPi * j / samples;
        pts[j] = {center.x + semi_x * std::cos(t), center.y + semi_y * std::sin(t)};
    }
    return smooth_curve(std::move(pts), true);
}

double Domain::radius() const {
    if (kind_ == DomainKind::SmoothCurve)
        throw Error("radius() is defined for disk domains only");
    return radius_;
}

void Domain::finalize_curve() {
    const int n = static_cast<int>(samples_.size());
    std::vector<double> xs(n), ys(n);
    Vec2 centroid{};
    for (int j = 0; j < n; ++j) {
        xs[j] = samples_[j].x;
        ys[j] = samples_[j].y;
        centroid += samples_[j];
    }
    center_ = centroid / n;
    cx_ = TrigSeries::fit(xs);
    cy_ = TrigSeries::fit(ys);

    // Orientation: signed area must be positive (counterclockwise).
    double area2 = 0.0;
    for (int j = 0; j < n; ++j) area2 += samples_[j].cross(samples_[(j + 1) % n]);
    if (area2 < 0.0) throw DegenerateBoundary("boundary samples must be ordered counterclockwise");

    // Simple-curve check at sample resolution: no two non-adjacent chords intersect.
    auto segs_intersect = [](Vec2 p1, Vec2 p2, Vec2 q1, Vec2 q2) {
        const double d1 = (p2 - p1).cross(q1 - p1);
        const double d2 = (p2 - p1).cross(q2 - p1);
        const double d3 = (q2 - q1).cross(p1 - q1);
        const double d4 = (q2 - q1).cross(p2 - q1);
        return (d1 * d2 < 0.0) && (d3 * d4 < 0.0);
    };
    for (int i = 0; i < n; ++i) {
        for (int j = i + 2; j < n; ++j) {
            if (i == 0 && j == n - 1) continue; // adjacent around the seam
            if (segs_intersect(samples_[i], samples_[(i + 1) % n], samples_[j], samples_[(j + 1) % n]))
                throw DegenerateBoundary("boundary self-intersects at sample resolution");
        }
    }

    // Speed series and perimeter; curvature extrema for rho_bar.
    const int fine = 4 * n;
    std::vector<double> speed(fine);
    double max_curv = 0.0;
    double min_speed = std::numeric_limits<double>::infinity();
    for (int j = 0; j < fine; ++j) {
        const double t = kTwoPi * j / fine;
        const Vec2 d1{cx_.deriv(t), cy_.deriv(t)};
        const Vec2 d2{cx_.deriv2(t), cy_.deriv2(t)};
        const double sp = d1.norm();
        speed[j] = sp;
        min_speed = std::min(min_speed, sp);
        const double curv = std::abs(d1.cross(d2)) / (sp * sp * sp);
        max_curv = std::max(max_curv, curv);
    }
    if (min_speed < 1e-12) throw DegenerateBoundary("parametrization speed vanishes");
    speed_ = TrigSeries::fit(speed);
    perimeter_ = speed_.a0 * kTwoPi;

    double diam = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) diam = std::max(diam, dist(samples_[i], samples_[j]));
    diameter_ = diam;

    if (!(max_curv > 0.0) || !std::isfinite(max_curv))
        throw DegenerateBoundary("curvature estimate diverged");

    // rho_bar: curvature bound capped by a discrete reach estimate,
    // reach <= |p-q|^2 / (2 dist(q, tangent line at p)) over sample pairs.
    double reach = 1.0 / max_curv;
    for (int i = 0; i < n; ++i) {
        const double ti = kTwoPi * i / n;
        const Vec2 tau = Vec2{cx_.deriv(ti), cy_.deriv(ti)}.normalized();
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const Vec2 w = samples_[j] - samples_[i];
            const double off = std::abs(tau.cross(w));
            if (off > 1e-14) reach = std::min(reach, w.norm_sq() / (2.0 * off));
        }
    }
    rho_bar_ = reach;
}

// ---------------------------------------------------------------------------
// Boundary queries

Vec2 Domain::boundary_position(double t) const {
    if (kind_ != DomainKind::SmoothCurve)
        return center_ + radius_ * Vec2{std::cos(t), std::sin(t)};
    return {cx_.eval(t), cy_.eval(t)};
}

Vec2 Domain::boundary_velocity(double t) const {
    if (kind_ != DomainKind::SmoothCurve)
        return radius_ * Vec2{-std::sin(t), std::cos(t)};
    return {cx_.deriv(t), cy_.deriv(t)};
}

BoundaryPoint Domain::boundary_point(double t) const {
    t = wrap_2pi(t);
    BoundaryPoint bp;
    if (kind_ != DomainKind::SmoothCurve) {
        const Vec2 dir{std::cos(t), std::sin(t)};
        bp.position = center_ + radius_ * dir;
        bp.outward_normal = dir;
        bp.tangent = dir.rot90_ccw();
        bp.curvature = 1.0 / radius_;
        bp.arc_parameter = radius_ * t;
        return bp;
    }
    const Vec2 d1{cx_.deriv(t), cy_.deriv(t)};
    const Vec2 d2{cx_.deriv2(t), cy_.deriv2(t)};
    const double sp = d1.norm();
    bp.position = boundary_position(t);
    bp.tangent = d1 / sp;
    bp.outward_normal = bp.tangent.rot90_cw(); // interior on the left of a CCW tangent
    bp.curvature = d1.cross(d2) / (sp * sp * sp);
    bp.arc_parameter = arc_length(t);
    return bp;
}

double Domain::arc_length(double t) const {
    if (kind_ != DomainKind::SmoothCurve) return radius_ * wrap_2pi(t);
    return speed_.integral0(wrap_2pi(t));
}

double Domain::param_from_arc(double s) const {
    if (kind_ != DomainKind::SmoothCurve) return wrap_2pi(s / radius_);
    s = std::fmod(s, perimeter_);
    if (s < 0.0) s += perimeter_;
    // Newton on arc_length(t) = s with monotone derivative |gamma'|.
    double t = kTwoPi * s / perimeter_;
    for (int it = 0; it < 50; ++it) {
        const double f = speed_.integral0(t) - s;
        const double df = speed_.eval(t);
        const double step = f / df;
        t -= step;
        if (std::abs(step) < 1e-14) break;
    }
    return wrap_2pi(t);
}

bool Domain::contains(Vec2 p) const {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
    if (kind_ != DomainKind::SmoothCurve) return dist(p, center_) < radius_;
    return inside_curve(p);
}

double Domain::signed_boundary_distance(Vec2 p) const {
    if (kind_ != DomainKind::SmoothCurve) return radius_ - dist(p, center_);
    // Nearest sample scan, Newton refine, then sign of the normal component.
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    const int n = static_cast<int>(samples_.size());
    for (int j = 0; j < n; ++j) {
        const double dd = (samples_[j] - p).norm_sq();
        if (dd < best_d) {
            best_d = dd;
            best = j;
        }
    }
    const double t = newton_project(p, kTwoPi * best / n);
    const Vec2 q = boundary_position(t);
    const Vec2 nrm = boundary_point(t).outward_normal;
    const double d = dist(p, q);
    return (p - q).dot(nrm) < 0.0 ? d : -d;
}

bool Domain::inside_curve(Vec2 p) const { return signed_boundary_distance(p) > 0.0; }

double Domain::newton_project(Vec2 p, double t0) const {
    // Minimize |gamma(t) - p|^2; safeguarded Newton.
    double t = t0;
    for (int it = 0; it < 60; ++it) {
        const Vec2 g{cx_.eval(t), cy_.eval(t)};
        const Vec2 d1{cx_.deriv(t), cy_.deriv(t)};
        const Vec2 d2{cx_.deriv2(t), cy_.deriv2(t)};
        const Vec2 w = g - p;
        const double f1 = w.dot(d1);
        double f2 = d1.norm_sq() + w.dot(d2);
        if (f2 <= 1e-14) f2 = d1.norm_sq();
        const double step = f1 / f2;
        t -= step;
        if (std::abs(step) < 1e-13) break;
    }
    return wrap_2pi(t);
}

BoundaryProjection Domain::nearest_boundary(Vec2 p) const {
    BoundaryProjection r;
    if (kind_ != DomainKind::SmoothCurve) {
        const Vec2 w = p - center_;
        const double rho = w.norm();
        if (rho >= radius_) throw OutsideDomain("nearest_boundary requires an interior point");
        if (rho < 1e-13 * radius_) {
            // Full symmetry: every boundary point minimizes. Deterministic
            // representative at the smallest arc parameter.
            r.distance = radius_;
            r.point = boundary_point(0.0);
            r.ambiguous = true;
            return r;
        }
        const double t = wrap_2pi(std::atan2(w.y, w.x));
        r.distance = radius_ - rho;
        r.point = boundary_point(t);
        r.ambiguous = false;
        return r;
    }

    if (!contains(p)) throw OutsideDomain("nearest_boundary requires an interior point");
    const int n = static_cast<int>(samples_.size());
    // Collect local minima of the sampled distance, refine each by Newton.
    std::vector<double> candidates;
    std::vector<double> sample_d(n);
    for (int j = 0; j < n; ++j) sample_d[j] = (samples_[j] - p).norm_sq();
    for (int j = 0; j < n; ++j) {
        const double prev = sample_d[(j + n - 1) % n], next = sample_d[(j + 1) % n];
        if (sample_d[j] <= prev && sample_d[j] <= next) candidates.push_back(kTwoPi * j / n);
    }
    double best_t = 0.0, second_d = std::numeric_limits<double>::infinity();
    double best_d = std::numeric_limits<double>::infinity();
    for (double c : candidates) {
        const double t = newton_project(p, c);
        const double d = dist(boundary_position(t), p);
        if (d < best_d - 1e-14) {
            second_d = best_d;
            best_d = d;
            best_t = t;
        } else if (std::abs(d - best_d) <= 1e-14) {
            // ties resolved toward the smallest parameter
            if (t < best_t) best_t = t;
            second_d = std::min(second_d, d);
        } else {
            second_d = std::min(second_d, d);
        }
    }
    r.distance = best_d;
    r.point = boundary_point(best_t);
    r.ambiguous = (best_d > rho_bar_) && (second_d < best_d * (1.0 + 1e-9));
    return r;
}

double Domain::radial_extent(Vec2 p, double phi) const {
    const Vec2 w{std::cos(phi), std::sin(phi)};
    if (kind_ != DomainKind::SmoothCurve) {
        const Vec2 u = p - center_;
        const double beta = u.dot(w);
        const double disc = beta * beta + radius_ * radius_ - u.norm_sq();
        if (disc < 0.0) throw OutsideDomain("radial_extent requires an interior point");
        return -beta + std::sqrt(disc);
    }
    // Root of (gamma(t) - p) x w = 0 with positive ray coordinate; initial
    // guess from the sample minimizing the angular mismatch.
    const int n = static_cast<int>(samples_.size());
    int best = -1;
    double best_angle = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        const Vec2 v = samples_[j] - p;
        if (v.dot(w) <= 0.0) continue;
        const double mis = std::abs(std::atan2(v.cross(w), v.dot(w)));
        if (mis < best_angle) {
            best_angle = mis;
            best = j;
        }
    }
    if (best < 0) throw OutsideDomain("no boundary intersection along ray");
    double t = kTwoPi * best / n;
    for (int it = 0; it < 60; ++it) {
        const Vec2 g{cx_.eval(t), cy_.eval(t)};
        const Vec2 d1{cx_.deriv(t), cy_.deriv(t)};
        const double f = (g - p).cross(w);
        const double df = d1.cross(w);
        if (std::abs(df) < 1e-14) break;
        const double step = f / df;
        t -= step;
        if (std::abs(step) < 1e-13) break;
    }
    const Vec2 v = boundary_position(t) - p;
    const double s = v.dot(w);
    if (s <= 0.0) throw OutsideDomain("ray intersection behind the point");
    return s;
}

// ---------------------------------------------------------------------------
// Separation measures

double separation(const std::vector<Vec2>& positions, const Domain& domain) {
    if (positions.empty()) throw EmptyConfiguration("separation of an empty configuration");
    double d = std::numeric_limits<double>::infinity();
    for (const Vec2& z : positions) d = std::min(d, domain.nearest_boundary(z).distance);
    for (std::size_t i = 0; i < positions.size(); ++i)
        for (std::size_t j = i + 1; j < positions.size(); ++j)
            d = std::min(d, dist(positions[i], positions[j]));
    return d;
}

bool in_region_D(const Domain& domain, const std::vector<Vec2>& positions,
                 double delta, double gamma) {
    if (!(delta < gamma)) throw ParameterOrder("in_region_D requires delta < gamma");
    if (positions.empty()) throw EmptyConfiguration("in_region_D of an empty configuration");
    if (domain.nearest_boundary(positions.front()).distance >= delta) return false;
    if (positions.size() == 1) return true;
    const std::vector<Vec2> tail(positions.begin() + 1, positions.end());
    return separation(tail, domain) > gamma;
}

bool in_region_C(const Domain& domain, const std::vector<Vec2>& positions,
                 double zeta, double eta) {
    if (!(zeta < eta)) throw ParameterOrder("in_region_C requires zeta < eta");
    if (positions.size() < 2) throw EmptyConfiguration("in_region_C needs at least two positions");
    if (dist(positions[0], positions[1]) >= zeta) return false;
    for (int i = 0; i < 2; ++i)
        if (domain.nearest_boundary(positions[i]).distance <= eta) return false;
    for (std::size_t j = 2; j < positions.size(); ++j) {
        if (dist(positions[0], positions[j]) <= eta) return false;
        if (dist(positions[1], positions[j]) <= eta) return false;
    }
    if (positions.size() > 2) {
        const std::vector<Vec2> tail(positions.begin() + 2, positions.end());
        if (separation(tail, domain) <= eta) return false;
    }
    return true;
}

} // namespace dislocore

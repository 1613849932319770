#pragma once

#include <array>
#include <optional>
#include <variant>
#include <vector>

#include "featcurve/core.hpp"
#include "featcurve/kdtree.hpp"

namespace featcurve {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// ---------------------------------------------------------------------------
// Curve types
// ---------------------------------------------------------------------------

struct LineSegment {
    Point3 a, b;

    LineSegment() = default;
    LineSegment(const Point3& a_, const Point3& b_) : a(a_), b(b_) {
        if (dist2(a, b) == 0.0) throw DuplicatePoints("LineSegment endpoints coincide");
    }
};

struct CircleThreePoint {
    Point3 p1, p2, p3;
};

// Circle in canonical (n, c, r) form with an in-plane frame (u, v) such that
// points are c + r*(u*cos(a) + v*sin(a)).  arc_range [lo, hi] covers the full
// circle when [0, 2*pi]; open arcs always start at lo = 0 with u pointing at
// the arc start point.
struct CircleCanonical {
    Vec3 n;        // unit plane normal
    Point3 c;      // center
    double r = 0;  // radius > 0
    Vec3 u, v;     // unit in-plane frame, v = u x n
    double arc_lo = 0.0;
    double arc_hi = kTwoPi;
    std::optional<CircleThreePoint> provenance;  // defining points, if known

    bool full() const { return arc_hi - arc_lo >= kTwoPi - 1e-12; }
    double span() const { return arc_hi - arc_lo; }

    Point3 at(double alpha) const {
        return c + r * (u * std::cos(alpha) + v * std::sin(alpha));
    }

    // angle of p's in-plane projection in [0, 2*pi)
    double angle_of(const Point3& p) const {
        const Vec3 d = p - c;
        double a = std::atan2(d.dot(v), d.dot(u));
        if (a < 0.0) a += kTwoPi;
        return a;
    }

    // rebase the in-plane frame so that `start` (a point on the circle) sits
    // at angle zero; arc span is preserved relative to the new start
    CircleCanonical with_start(const Point3& start, double new_span) const {
        CircleCanonical out = *this;
        Vec3 d = start - c;
        d = d - n * d.dot(n);
        out.u = d.normalized();
        out.v = out.u.cross(n);
        out.arc_lo = 0.0;
        out.arc_hi = new_span;
        return out;
    }
};

// Clamped cubic B-spline on knots [0,0,0,0,1,1,1,1]; interpolates its
// first and last control points.
struct CubicBSpline {
    std::array<Point3, 4> control;
};

enum class CurveKind { Line, Circle, BSpline };

inline const char* to_string(CurveKind k) {
    switch (k) {
        case CurveKind::Line: return "line";
        case CurveKind::Circle: return "circle";
        default: return "bspline";
    }
}

struct ParametricCurve {
    std::variant<LineSegment, CircleCanonical, CubicBSpline> payload;
    bool closed = false;

    CurveKind kind() const {
        if (std::holds_alternative<LineSegment>(payload)) return CurveKind::Line;
        if (std::holds_alternative<CircleCanonical>(payload)) return CurveKind::Circle;
        return CurveKind::BSpline;
    }
    const LineSegment& line() const { return std::get<LineSegment>(payload); }
    const CircleCanonical& circle() const { return std::get<CircleCanonical>(payload); }
    const CubicBSpline& bspline() const { return std::get<CubicBSpline>(payload); }
};

inline ParametricCurve make_line(const Point3& a, const Point3& b) {
    return {LineSegment{a, b}, false};
}
inline ParametricCurve make_circle(const CircleCanonical& c) { return {c, c.full()}; }
inline ParametricCurve make_bspline(const CubicBSpline& s) { return {s, false}; }

// ---------------------------------------------------------------------------
// Circle through three points
// ---------------------------------------------------------------------------

inline CircleCanonical circle_from_three_points(const Point3& p1, const Point3& p2,
                                                const Point3& p3) {
    const double d12 = dist(p1, p2), d13 = dist(p1, p3), d23 = dist(p2, p3);
    const double dmax = std::max({d12, d13, d23});
    if (dmax == 0.0 || std::min({d12, d13, d23}) <= 1e-12 * dmax)
        throw DuplicatePoints("circle_from_three_points: coincident input points");

    const Vec3 v1 = p2 - p1, v2 = p3 - p1;
    const Vec3 cr = v1.cross(v2);
    const double area = 0.5 * cr.norm();
    if (area <= 1e-9 * dmax * dmax)
        throw CollinearPoints("circle_from_three_points: collinear input points");

    const double den = 2.0 * cr.norm2();
    const Vec3 offset = (cr.cross(v1) * v2.norm2() + v2.cross(cr) * v1.norm2()) / den;
    CircleCanonical out;
    out.c = p1 + offset;
    out.r = dist(out.c, p1);
    out.n = cr.normalized();
    out.u = (p1 - out.c).normalized();
    out.v = out.u.cross(out.n);
    out.arc_lo = 0.0;
    out.arc_hi = kTwoPi;
    out.provenance = CircleThreePoint{p1, p2, p3};
    return out;
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

inline std::vector<Point3> sample_line(const LineSegment& l, int m) {
    if (m < 2) throw Error("sample_line: m must be >= 2");
    std::vector<Point3> out(m);
    for (int j = 0; j < m; ++j) {
        const double t = double(j) / double(m - 1);
        out[j] = l.a + (l.b - l.a) * t;
    }
    out[0] = l.a;
    out[m - 1] = l.b;
    return out;
}

// Uniform angles across arc_range; the 2*pi endpoint is skipped for full
// circles so samples stay distinct.
inline std::vector<Point3> sample_circle(const CircleCanonical& c, int m) {
    if (m < 1) throw Error("sample_circle: m must be >= 1");
    std::vector<Point3> out;
    out.reserve(m);
    const double lo = c.arc_lo, span = c.span();
    if (c.full()) {
        for (int j = 0; j < m; ++j) out.push_back(c.at(lo + span * double(j) / double(m)));
    } else if (m == 1) {
        out.push_back(c.at(lo));
    } else {
        for (int j = 0; j < m; ++j)
            out.push_back(c.at(lo + span * double(j) / double(m - 1)));
    }
    return out;
}

// Cox-de Boor basis of the clamped cubic on [0,0,0,0,1,1,1,1].
inline std::array<double, 4> bspline_basis4(double t) {
    if (t <= 0.0) return {1.0, 0.0, 0.0, 0.0};
    if (t >= 1.0) return {0.0, 0.0, 0.0, 1.0};
    static constexpr std::array<double, 8> knots{0, 0, 0, 0, 1, 1, 1, 1};
    std::array<double, 8> b{};
    // order 1: indicator of [knots[i], knots[i+1]); t in (0,1) lands in span 3
    b[3] = 1.0;
    for (int k = 2; k <= 4; ++k) {
        for (int i = 0; i <= 7 - k; ++i) {
            const double den1 = knots[i + k - 1] - knots[i];
            const double den2 = knots[i + k] - knots[i + 1];
            double val = 0.0;
            if (den1 > 0.0) val += (t - knots[i]) / den1 * b[i];
            if (den2 > 0.0) val += (knots[i + k] - t) / den2 * b[i + 1];
            b[i] = val;
        }
    }
    return {b[0], b[1], b[2], b[3]};
}

inline Point3 bspline_eval(const CubicBSpline& s, double t) {
    if (t <= 0.0) return s.control[0];
    if (t >= 1.0) return s.control[3];
    const auto b = bspline_basis4(t);
    return s.control[0] * b[0] + s.control[1] * b[1] + s.control[2] * b[2] +
           s.control[3] * b[3];
}

inline Vec3 bspline_derivative(const CubicBSpline& s, double t) {
    // hodograph of the clamped cubic (Bernstein form on these knots)
    const double omt = 1.0 - t;
    const Vec3 d0 = s.control[1] - s.control[0];
    const Vec3 d1 = s.control[2] - s.control[1];
    const Vec3 d2 = s.control[3] - s.control[2];
    return 3.0 * (d0 * (omt * omt) + d1 * (2.0 * omt * t) + d2 * (t * t));
}

inline Vec3 bspline_second_derivative(const CubicBSpline& s, double t) {
    const Vec3 d0 = s.control[2] - 2.0 * s.control[1] + s.control[0];
    const Vec3 d1 = s.control[3] - 2.0 * s.control[2] + s.control[1];
    return 6.0 * (d0 * (1.0 - t) + d1 * t);
}

inline std::vector<Point3> sample_bspline(const CubicBSpline& s, int m) {
    if (m < 2) throw Error("sample_bspline: m must be >= 2");
    std::vector<Point3> out(m);
    for (int j = 0; j < m; ++j) out[j] = bspline_eval(s, double(j) / double(m - 1));
    out[0] = s.control[0];
    out[m - 1] = s.control[3];
    return out;
}

inline std::vector<Point3> sample_curve(const ParametricCurve& c, int m) {
    switch (c.kind()) {
        case CurveKind::Line: return sample_line(c.line(), std::max(m, 2));
        case CurveKind::Circle: return sample_circle(c.circle(), std::max(m, 1));
        default: return sample_bspline(c.bspline(), std::max(m, 2));
    }
}

// Arc-length-uniform samples; lines and circles are already length-uniform
// in parameter, splines invert a cumulative chord-length table.
inline std::vector<Point3> sample_curve_arclength(const ParametricCurve& c, int m) {
    if (c.kind() != CurveKind::BSpline) return sample_curve(c, m);
    const auto& s = c.bspline();
    constexpr int kTable = 256;
    std::array<double, kTable + 1> cum{};
    Point3 prev = s.control[0];
    for (int i = 1; i <= kTable; ++i) {
        const Point3 cur = bspline_eval(s, double(i) / kTable);
        cum[i] = cum[i - 1] + dist(prev, cur);
        prev = cur;
    }
    std::vector<Point3> out(std::max(m, 2));
    const int n = static_cast<int>(out.size());
    for (int j = 0; j < n; ++j) {
        const double target = cum[kTable] * double(j) / double(n - 1);
        int lo = 0, hi = kTable;
        while (lo + 1 < hi) {
            const int mid = (lo + hi) / 2;
            (cum[mid] <= target ? lo : hi) = mid;
        }
        const double seg = cum[lo + 1] - cum[lo];
        const double ts = seg > 0.0 ? (target - cum[lo]) / seg : 0.0;
        out[j] = bspline_eval(s, (double(lo) + ts) / kTable);
    }
    out.front() = s.control[0];
    out.back() = s.control[3];
    return out;
}

// ---------------------------------------------------------------------------
// Point-to-curve distances (exact for lines/circles, refined for splines)
// ---------------------------------------------------------------------------

inline double dist_point_segment(const Point3& p, const Point3& a, const Point3& b) {
    const Vec3 ab = b - a;
    const double len2 = ab.norm2();
    if (len2 == 0.0) return dist(p, a);
    double t = (p - a).dot(ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return dist(p, a + ab * t);
}

inline double dist_point_circle(const Point3& p, const CircleCanonical& c) {
    const Vec3 d = p - c.c;
    const double h = d.dot(c.n);
    const Vec3 w = d - c.n * h;
    const double rho = w.norm();
    const double ring = std::hypot(rho - c.r, h);
    if (c.full() || rho <= 1e-15 * c.r) return ring;
    const double a = c.angle_of(p);
    if (a >= c.arc_lo && a <= c.arc_hi) return ring;
    return std::min(dist(p, c.at(c.arc_lo)), dist(p, c.at(c.arc_hi)));
}

inline double dist_point_bspline(const Point3& p, const CubicBSpline& s, int coarse = 96) {
    double best_t = 0.0, best_d2 = std::numeric_limits<double>::max();
    Point3 prev = bspline_eval(s, 0.0);
    for (int i = 1; i <= coarse; ++i) {
        const double t1 = double(i) / coarse;
        const Point3 cur = bspline_eval(s, t1);
        // closest point on segment [prev, cur], tracked in parameter space
        const Vec3 seg = cur - prev;
        const double len2 = seg.norm2();
        double ts = len2 > 0.0 ? std::clamp((p - prev).dot(seg) / len2, 0.0, 1.0) : 0.0;
        const Point3 q = prev + seg * ts;
        const double d2 = dist2(p, q);
        if (d2 < best_d2) {
            best_d2 = d2;
            best_t = (double(i - 1) + ts) / coarse;
        }
        prev = cur;
    }
    // Newton polish on g(t) = (B(t)-p) . B'(t)
    double t = best_t;
    for (int it = 0; it < 3; ++it) {
        const Vec3 diff = bspline_eval(s, t) - p;
        const Vec3 d1 = bspline_derivative(s, t);
        const Vec3 d2v = bspline_second_derivative(s, t);
        const double g = diff.dot(d1);
        const double gp = d1.norm2() + diff.dot(d2v);
        if (gp <= 0.0) break;
        t = std::clamp(t - g / gp, 0.0, 1.0);
    }
    return std::min(std::sqrt(best_d2), dist(p, bspline_eval(s, t)));
}

inline double dist_point_curve(const Point3& p, const ParametricCurve& c) {
    switch (c.kind()) {
        case CurveKind::Line: return dist_point_segment(p, c.line().a, c.line().b);
        case CurveKind::Circle: return dist_point_circle(p, c.circle());
        default: return dist_point_bspline(p, c.bspline());
    }
}

inline double curve_length(const ParametricCurve& c) {
    switch (c.kind()) {
        case CurveKind::Line: return dist(c.line().a, c.line().b);
        case CurveKind::Circle: return c.circle().r * c.circle().span();
        default: {
            double len = 0.0;
            Point3 prev = c.bspline().control[0];
            for (int i = 1; i <= 256; ++i) {
                const Point3 cur = bspline_eval(c.bspline(), double(i) / 256.0);
                len += dist(prev, cur);
                prev = cur;
            }
            return len;
        }
    }
}

// endpoints of an open curve (full circles have none)
inline std::optional<std::pair<Point3, Point3>> curve_endpoints(const ParametricCurve& c) {
    switch (c.kind()) {
        case CurveKind::Line: return std::make_pair(c.line().a, c.line().b);
        case CurveKind::Circle:
            if (c.circle().full()) return std::nullopt;
            return std::make_pair(c.circle().at(c.circle().arc_lo),
                                  c.circle().at(c.circle().arc_hi));
        default: return std::make_pair(c.bspline().control[0], c.bspline().control[3]);
    }
}

// ---------------------------------------------------------------------------
// Chamfer distance
// ---------------------------------------------------------------------------

// Sum of the two directed mean nearest-neighbor distances.  Accumulation
// order is fixed (input order, sqrt per term) so a brute-force evaluation
// with the same convention matches bit-for-bit.
inline double chamfer_distance(const std::vector<Point3>& a, const std::vector<Point3>& b) {
    if (a.empty() || b.empty()) throw EmptySet("chamfer_distance: empty point set");
    const KdTree3 ta(a), tb(b);
    double sum_a = 0.0;
    for (const auto& p : a) sum_a += std::sqrt(tb.nearest_dist2(p));
    double sum_b = 0.0;
    for (const auto& p : b) sum_b += std::sqrt(ta.nearest_dist2(p));
    return sum_a / double(a.size()) + sum_b / double(b.size());
}

// Directed mean nearest-neighbor distance from a to b.
inline double mean_nn_distance(const std::vector<Point3>& a, const std::vector<Point3>& b) {
    if (a.empty() || b.empty()) throw EmptySet("mean_nn_distance: empty point set");
    const KdTree3 tb(b);
    double sum = 0.0;
    for (const auto& p : a) sum += std::sqrt(tb.nearest_dist2(p));
    return sum / double(a.size());
}

}  // namespace featcurve

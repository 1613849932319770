#pragma once

#include <vector>

#include "featcurve/detection.hpp"
#include "featcurve/geometry.hpp"
#include "featcurve/kdtree.hpp"

namespace featcurve {

// ---------------------------------------------------------------------------
// Scene specification
// ---------------------------------------------------------------------------

enum class SolidKind { BoxUnion, CylinderUnion, WireframeOnly };

inline const char* to_string(SolidKind k) {
    switch (k) {
        case SolidKind::BoxUnion: return "box_union";
        case SolidKind::CylinderUnion: return "cylinder_union";
        default: return "wireframe_only";
    }
}

struct CurveBudget {
    int lines = 0, arcs = 0, circles = 0, bsplines = 0;
    int total() const { return lines + arcs + circles + bsplines; }
};

struct SceneSpec {
    std::uint64_t seed = 0;
    int n_points = 8096;
    CurveBudget budget;
    SolidKind kind = SolidKind::BoxUnion;
    double noise_x = 0.0;
};

struct SyntheticScene {
    SceneSpec spec;
    PointCloud cloud;
    GroundTruthLabels gt;
    std::vector<ParametricCurve> curves;  // curve id = index
    std::vector<Point3> corners;
    std::vector<Vec3> normals;            // displacement direction per point
    std::vector<double> local_size;       // per-point local feature size
    double feature_size = 0.0;            // median nearest-neighbor spacing
};

// ---------------------------------------------------------------------------
// Nearest point on a curve (exact for lines/circles, refined for splines)
// ---------------------------------------------------------------------------

inline Point3 nearest_point_on_curve(const Point3& p, const ParametricCurve& c) {
    switch (c.kind()) {
        case CurveKind::Line: {
            const auto& l = c.line();
            const Vec3 ab = l.b - l.a;
            const double t = std::clamp((p - l.a).dot(ab) / ab.norm2(), 0.0, 1.0);
            return l.a + ab * t;
        }
        case CurveKind::Circle: {
            const auto& cc = c.circle();
            const Vec3 d = p - cc.c;
            const Vec3 w = d - cc.n * d.dot(cc.n);
            const double rho = w.norm();
            if (rho <= 1e-15 * cc.r) return cc.at(cc.arc_lo);
            if (cc.full()) return cc.c + w * (cc.r / rho);
            const double a = cc.angle_of(p);
            if (a >= cc.arc_lo && a <= cc.arc_hi) return cc.c + w * (cc.r / rho);
            const Point3 e0 = cc.at(cc.arc_lo), e1 = cc.at(cc.arc_hi);
            return dist2(p, e0) <= dist2(p, e1) ? e0 : e1;
        }
        default: {
            const auto& s = c.bspline();
            double best_t = 0.0, best_d2 = std::numeric_limits<double>::max();
            Point3 prev = bspline_eval(s, 0.0);
            constexpr int coarse = 96;
            for (int i = 1; i <= coarse; ++i) {
                const double t1 = double(i) / coarse;
                const Point3 cur = bspline_eval(s, t1);
                const Vec3 seg = cur - prev;
                const double len2 = seg.norm2();
                const double ts =
                    len2 > 0.0 ? std::clamp((p - prev).dot(seg) / len2, 0.0, 1.0) : 0.0;
                const double d2v = dist2(p, prev + seg * ts);
                if (d2v < best_d2) {
                    best_d2 = d2v;
                    best_t = (double(i - 1) + ts) / coarse;
                }
                prev = cur;
            }
            double t = best_t;
            for (int it = 0; it < 3; ++it) {
                const Vec3 diff = bspline_eval(s, t) - p;
                const Vec3 d1 = bspline_derivative(s, t);
                const Vec3 d2c = bspline_second_derivative(s, t);
                const double g = diff.dot(d1);
                const double gp = d1.norm2() + diff.dot(d2c);
                if (gp <= 0.0) break;
                t = std::clamp(t - g / gp, 0.0, 1.0);
            }
            const Point3 refined = bspline_eval(s, t);
            return dist2(p, refined) <= best_d2 ? refined : bspline_eval(s, best_t);
        }
    }
}

// ---------------------------------------------------------------------------
// Generation internals
// ---------------------------------------------------------------------------

namespace detail {

struct SurfacePatch {
    // rectangle: origin + s*e1 + t*e2, s,t in [0,1]; normal fixed
    // lateral:   axis frame; cap: disk
    enum Kind { Rect, Lateral, Cap } kind = Rect;
    Point3 origin;       // rect corner / cylinder base center / cap center
    Vec3 e1, e2;         // rect spans or cylinder frame (unit * radius scale)
    Vec3 normal;         // rect/cap normal
    Vec3 axis;           // lateral axis (unit)
    double radius = 0, height = 0;
    double area = 0;
};

struct Frame {
    Vec3 x, y, z;
};

inline Frame random_frame(Rng& rng) {
    const Vec3 z = rng.unit_vector();
    Vec3 x = any_orthogonal(z);
    const double a = rng.uniform(0.0, kTwoPi);
    const Vec3 y0 = z.cross(x).normalized();
    x = (x * std::cos(a) + y0 * std::sin(a)).normalized();
    return {x, z.cross(x).normalized(), z};
}

struct SceneBuild {
    std::vector<ParametricCurve> curves;
    std::vector<Point3> corners;          // deduplicated open-curve endpoints
    std::vector<SurfacePatch> patches;    // empty for wireframes
};

inline void add_corner(std::vector<Point3>& corners, const Point3& p) {
    for (const auto& c : corners)
        if (dist(c, p) < 1e-9) return;
    corners.push_back(p);
}

inline void add_open_curve(SceneBuild& b, const ParametricCurve& c) {
    b.curves.push_back(c);
    const auto ends = curve_endpoints(c);
    if (ends) {
        add_corner(b.corners, ends->first);
        add_corner(b.corners, ends->second);
    }
}

inline CircleCanonical make_full_circle(const Point3& center, const Vec3& axis, double r) {
    CircleCanonical c;
    c.c = center;
    c.n = axis.normalized();
    c.r = r;
    c.u = any_orthogonal(c.n);
    c.v = c.u.cross(c.n);
    c.arc_lo = 0.0;
    c.arc_hi = kTwoPi;
    return c;
}

inline void build_boxes(SceneBuild& b, const CurveBudget& budget, Rng& rng) {
    const int n_boxes = budget.lines / 12;
    std::vector<Point3> centers;
    std::vector<double> radii;
    struct Box {
        Point3 center;
        Vec3 h;  // half extents in local frame
        Frame f;
    };
    std::vector<Box> boxes;
    for (int bi = 0; bi < n_boxes; ++bi) {
        bool placed = false;
        for (int attempt = 0; attempt < 400 && !placed; ++attempt) {
            Box box;
            const double spread = n_boxes > 1 ? 1.6 : 0.2;
            box.center = {rng.uniform(-spread, spread), rng.uniform(-spread, spread),
                          rng.uniform(-spread, spread)};
            // spline-carrying faces need room for a 0.3 clearance margin
            const double hmin = budget.bsplines > 0 ? 0.45 : 0.3;
            box.h = {rng.uniform(hmin, 0.6), rng.uniform(hmin, 0.6), rng.uniform(hmin, 0.6)};
            box.f = random_frame(rng);
            const double br = box.h.norm();
            placed = true;
            for (std::size_t k = 0; k < boxes.size(); ++k) {
                if (dist(box.center, centers[k]) < br + radii[k] + 0.35) {
                    placed = false;
                    break;
                }
            }
            if (placed) {
                boxes.push_back(box);
                centers.push_back(box.center);
                radii.push_back(br);
            }
        }
        if (!placed) throw InfeasibleSpec("generate: could not place disjoint boxes");
    }

    int splines_left = budget.bsplines;
    for (const auto& box : boxes) {
        auto world = [&](double x, double y, double z) {
            return box.center + box.f.x * x + box.f.y * y + box.f.z * z;
        };
        const double hx = box.h.x, hy = box.h.y, hz = box.h.z;
        Point3 corner[8];
        for (int i = 0; i < 8; ++i)
            corner[i] = world((i & 1) ? hx : -hx, (i & 2) ? hy : -hy, (i & 4) ? hz : -hz);
        static constexpr int edges[12][2] = {{0, 1}, {2, 3}, {4, 5}, {6, 7}, {0, 2}, {1, 3},
                                             {4, 6}, {5, 7}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};
        for (const auto& e : edges) add_open_curve(b, make_line(corner[e[0]], corner[e[1]]));

        struct FaceDef {
            Vec3 n;       // local normal axis
            Vec3 a1, a2;  // local span axes
            double off, s1, s2;
        };
        const FaceDef faces[6] = {
            {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, hx, hy, hz},
            {{-1, 0, 0}, {0, 1, 0}, {0, 0, 1}, hx, hy, hz},
            {{0, 1, 0}, {1, 0, 0}, {0, 0, 1}, hy, hx, hz},
            {{0, -1, 0}, {1, 0, 0}, {0, 0, 1}, hy, hx, hz},
            {{0, 0, 1}, {1, 0, 0}, {0, 1, 0}, hz, hx, hy},
            {{0, 0, -1}, {1, 0, 0}, {0, 1, 0}, hz, hx, hy}};
        std::vector<int> spline_faces;
        for (int fi = 0; fi < 6; ++fi) {
            const auto& fd = faces[fi];
            auto axis_world = [&](const Vec3& local) {
                return box.f.x * local.x + box.f.y * local.y + box.f.z * local.z;
            };
            const Vec3 n = axis_world(fd.n);
            const Vec3 e1 = axis_world(fd.a1);
            const Vec3 e2 = axis_world(fd.a2);
            SurfacePatch patch;
            patch.kind = SurfacePatch::Rect;
            patch.origin = box.center + n * fd.off - e1 * fd.s1 - e2 * fd.s2;
            patch.e1 = e1 * (2.0 * fd.s1);
            patch.e2 = e2 * (2.0 * fd.s2);
            patch.normal = n;
            patch.area = 4.0 * fd.s1 * fd.s2;
            b.patches.push_back(patch);
            spline_faces.push_back(static_cast<int>(b.patches.size()) - 1);
        }

        // embed gentle planar splines on unused faces
        std::vector<int> order = spline_faces;
        for (std::size_t k = 0; k + 1 < order.size(); ++k)
            std::swap(order[k], order[k + rng.below(order.size() - k)]);
        for (int fi : order) {
            if (splines_left <= 0) break;
            const auto& patch = b.patches[fi];
            const Vec3 u1 = patch.e1, u2 = patch.e2;
            auto face_pt = [&](double s, double t) { return patch.origin + u1 * s + u2 * t; };
            // absolute 0.3 clearance from the face boundary (box edges and
            // corners must stay outside every proposal's corner-clearance zone)
            const double inset_s = 0.3 / u1.norm();
            const double inset_t = 0.3 / u2.norm();
            if (inset_s > 0.33 || inset_t > 0.33) continue;  // face too small
            auto rs = [&] { return rng.uniform(inset_s, 1.0 - inset_s); };
            auto rt = [&] { return rng.uniform(inset_t, 1.0 - inset_t); };
            const double s0 = rs(), t0 = rt();
            double s3 = rs(), t3 = rt();
            for (int tries = 0; tries < 50 && std::hypot(s3 - s0, t3 - t0) < 0.3; ++tries) {
                s3 = rs();
                t3 = rt();
            }
            if (std::hypot(s3 - s0, t3 - t0) < 0.3) continue;
            const double ps = -(t3 - t0), pt = s3 - s0;  // in-face perpendicular
            const double amp1 = rng.uniform(-0.22, 0.22), amp2 = rng.uniform(-0.22, 0.22);
            auto clamp01 = [&](double v) {
                return std::clamp(v, std::min(inset_s, inset_t) * 0.85,
                                  1.0 - std::min(inset_s, inset_t) * 0.85);
            };
            const Point3 p0 = face_pt(s0, t0);
            const Point3 p3 = face_pt(s3, t3);
            const Point3 p1 = face_pt(clamp01(s0 + (s3 - s0) / 3.0 + ps * amp1),
                                      clamp01(t0 + (t3 - t0) / 3.0 + pt * amp1));
            const Point3 p2 = face_pt(clamp01(s0 + 2.0 * (s3 - s0) / 3.0 + ps * amp2),
                                      clamp01(t0 + 2.0 * (t3 - t0) / 3.0 + pt * amp2));
            add_open_curve(b, make_bspline(CubicBSpline{{p0, p1, p2, p3}}));
            --splines_left;
        }
    }
    if (splines_left > 0)
        throw InfeasibleSpec("generate: not enough box faces for requested bsplines");
}

inline void build_cylinders(SceneBuild& b, const CurveBudget& budget, Rng& rng) {
    const int n_cyl = budget.circles / 2;
    std::vector<Point3> centers;
    std::vector<double> radii;
    for (int ci = 0; ci < n_cyl; ++ci) {
        bool placed = false;
        for (int attempt = 0; attempt < 400 && !placed; ++attempt) {
            const double spread = n_cyl > 1 ? 1.6 : 0.2;
            const Point3 center{rng.uniform(-spread, spread), rng.uniform(-spread, spread),
                                rng.uniform(-spread, spread)};
            const Vec3 axis = rng.unit_vector();
            const double r = rng.uniform(0.3, 0.6);
            const double hh = rng.uniform(0.4, 0.8);
            const double br = std::hypot(r, hh);
            placed = true;
            for (std::size_t k = 0; k < centers.size(); ++k)
                if (dist(center, centers[k]) < br + radii[k] + 0.25) {
                    placed = false;
                    break;
                }
            if (!placed) continue;
            centers.push_back(center);
            radii.push_back(br);

            const Point3 top = center + axis * hh, bot = center - axis * hh;
            b.curves.push_back(make_circle(make_full_circle(top, axis, r)));
            b.curves.push_back(make_circle(make_full_circle(bot, axis, r)));

            SurfacePatch lateral;
            lateral.kind = SurfacePatch::Lateral;
            lateral.origin = bot;
            lateral.axis = axis;
            lateral.e1 = any_orthogonal(axis);
            lateral.e2 = axis.cross(lateral.e1).normalized();
            lateral.radius = r;
            lateral.height = 2.0 * hh;
            lateral.area = kTwoPi * r * 2.0 * hh;
            b.patches.push_back(lateral);
            for (int side = 0; side < 2; ++side) {
                SurfacePatch cap;
                cap.kind = SurfacePatch::Cap;
                cap.origin = side ? top : bot;
                cap.normal = side ? axis : -axis;
                cap.e1 = lateral.e1;
                cap.e2 = lateral.e2;
                cap.radius = r;
                cap.area = M_PI * r * r;
                b.patches.push_back(cap);
            }
        }
        if (!placed) throw InfeasibleSpec("generate: could not place disjoint cylinders");
    }
}

inline double polyline_min_dist(const std::vector<Point3>& a, const std::vector<Point3>& c) {
    double best = std::numeric_limits<double>::max();
    for (const auto& p : a)
        for (const auto& q : c) best = std::min(best, dist(p, q));
    return best;
}

inline void build_wireframe(SceneBuild& b, const CurveBudget& budget, Rng& rng) {
    std::vector<std::vector<Point3>> placed_samples;
    auto try_place = [&](const ParametricCurve& c) {
        const auto samples = sample_curve(c, 48);
        for (const auto& other : placed_samples)
            if (polyline_min_dist(samples, other) < 0.3) return false;
        const auto ends = curve_endpoints(c);
        if (ends) {
            for (const auto& existing : b.corners) {
                if (dist(existing, ends->first) < 0.35 || dist(existing, ends->second) < 0.35)
                    return false;
            }
            for (const auto& other : placed_samples) {
                if (polyline_min_dist({ends->first}, other) < 0.35 ||
                    polyline_min_dist({ends->second}, other) < 0.35)
                    return false;
            }
        }
        placed_samples.push_back(samples);
        if (ends)
            add_open_curve(b, c);
        else
            b.curves.push_back(c);
        return true;
    };

    auto rand_point = [&] {
        return Point3{rng.uniform(-1.3, 1.3), rng.uniform(-1.3, 1.3), rng.uniform(-1.3, 1.3)};
    };

    struct Want {
        int count;
        int type;  // 0 line, 1 arc, 2 circle, 3 bspline
    };
    const Want wants[4] = {{budget.lines, 0}, {budget.arcs, 1}, {budget.circles, 2},
                           {budget.bsplines, 3}};
    for (const auto& w : wants) {
        for (int k = 0; k < w.count; ++k) {
            bool ok = false;
            for (int attempt = 0; attempt < 400 && !ok; ++attempt) {
                switch (w.type) {
                    case 0: {
                        const Point3 a = rand_point();
                        const Vec3 d = rng.unit_vector();
                        const double len = rng.uniform(0.6, 1.4);
                        ok = try_place(make_line(a, a + d * len));
                        break;
                    }
                    case 1: {
                        CircleCanonical c = make_full_circle(rand_point(), rng.unit_vector(),
                                                             rng.uniform(0.35, 0.7));
                        const double phase = rng.uniform(0.0, kTwoPi);
                        // spans above pi leave the corner-pair sphere and are
                        // unrecoverable by construction
                        c = c.with_start(c.at(phase), rng.uniform(0.5 * M_PI, 0.95 * M_PI));
                        ok = try_place(make_circle(c));
                        break;
                    }
                    case 2: {
                        ok = try_place(make_circle(make_full_circle(
                            rand_point(), rng.unit_vector(), rng.uniform(0.35, 0.7))));
                        break;
                    }
                    default: {
                        const Point3 p0 = rand_point();
                        const Vec3 dir = rng.unit_vector();
                        const double len = rng.uniform(0.7, 1.4);
                        const Point3 p3 = p0 + dir * len;
                        const Vec3 perp = random_frame(rng).x;
                        const Vec3 side = (perp - dir * perp.dot(dir)).normalized();
                        const double a1 = rng.uniform(0.08, 0.3) * len;
                        const double a2 = rng.uniform(0.08, 0.3) * len *
                                          (rng.uniform() < 0.5 ? 1.0 : -1.0);
                        const Point3 p1 = p0 + dir * (len / 3.0) + side * a1;
                        const Point3 p2 = p0 + dir * (2.0 * len / 3.0) + side * a2;
                        ok = try_place(make_bspline(CubicBSpline{{p0, p1, p2, p3}}));
                        break;
                    }
                }
            }
            if (!ok) throw InfeasibleSpec("generate: could not place separated wireframe curves");
        }
    }
}

// cumulative inverse arc-length sample of one curve at fraction f in [0,1)
inline std::pair<Point3, Vec3> curve_point_by_length(const ParametricCurve& c, double f,
                                                     Rng& rng) {
    Vec3 tangent;
    Point3 p;
    switch (c.kind()) {
        case CurveKind::Line: {
            p = c.line().a + (c.line().b - c.line().a) * f;
            tangent = (c.line().b - c.line().a).normalized();
            break;
        }
        case CurveKind::Circle: {
            const auto& cc = c.circle();
            const double a = cc.arc_lo + cc.span() * f;
            p = cc.at(a);
            tangent = (cc.v * std::cos(a) - cc.u * std::sin(a)).normalized();
            break;
        }
        default: {
            const auto& s = c.bspline();
            // invert the 256-segment cumulative length table
            std::array<double, 257> cum{};
            Point3 prev = bspline_eval(s, 0.0);
            for (int i = 1; i <= 256; ++i) {
                const Point3 cur = bspline_eval(s, double(i) / 256.0);
                cum[i] = cum[i - 1] + dist(prev, cur);
                prev = cur;
            }
            const double target = f * cum[256];
            int lo = 0, hi = 256;
            while (lo + 1 < hi) {
                const int mid = (lo + hi) / 2;
                if (cum[mid] <= target) lo = mid;
                else hi = mid;
            }
            const double seg = cum[lo + 1] - cum[lo];
            const double ts = seg > 0.0 ? (target - cum[lo]) / seg : 0.0;
            const double t = (double(lo) + ts) / 256.0;
            p = bspline_eval(s, t);
            tangent = bspline_derivative(s, t).normalized();
            break;
        }
    }
    // wireframes carry no surface; use a random perpendicular as the
    // displacement direction
    const Vec3 e1 = any_orthogonal(tangent);
    const Vec3 e2 = tangent.cross(e1).normalized();
    const double phi = rng.uniform(0.0, kTwoPi);
    return {p, e1 * std::cos(phi) + e2 * std::sin(phi)};
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Public operations
// ---------------------------------------------------------------------------

inline SyntheticScene add_noise(const SyntheticScene& scene, double x);

inline SyntheticScene generate(const SceneSpec& spec) {
    if (spec.n_points < 256) throw InfeasibleSpec("generate: n_points must be >= 256");
    if (spec.budget.total() < 1) throw InfeasibleSpec("generate: need at least one curve");
    switch (spec.kind) {
        case SolidKind::BoxUnion:
            if (spec.budget.lines <= 0 || spec.budget.lines % 12 != 0 ||
                spec.budget.arcs != 0 || spec.budget.circles != 0)
                throw InfeasibleSpec("generate: box scenes need lines = 12*k and no arcs/circles");
            break;
        case SolidKind::CylinderUnion:
            if (spec.budget.circles <= 0 || spec.budget.circles % 2 != 0 ||
                spec.budget.lines != 0 || spec.budget.arcs != 0 || spec.budget.bsplines != 0)
                throw InfeasibleSpec("generate: cylinder scenes carry rim circles only");
            break;
        case SolidKind::WireframeOnly:
            break;
    }

    Rng rng(spec.seed);
    detail::SceneBuild build;
    switch (spec.kind) {
        case SolidKind::BoxUnion: detail::build_boxes(build, spec.budget, rng); break;
        case SolidKind::CylinderUnion: detail::build_cylinders(build, spec.budget, rng); break;
        case SolidKind::WireframeOnly: detail::build_wireframe(build, spec.budget, rng); break;
    }

    const int n = spec.n_points;
    std::vector<Point3> points(n);
    std::vector<Vec3> normals(n);
    std::vector<int> source_curve(n, -1);  // wireframe: generating curve

    if (spec.kind == SolidKind::WireframeOnly) {
        std::vector<double> cum(build.curves.size() + 1, 0.0);
        for (std::size_t c = 0; c < build.curves.size(); ++c)
            cum[c + 1] = cum[c] + curve_length(build.curves[c]);
        for (int i = 0; i < n; ++i) {
            const double pick = rng.uniform() * cum.back();
            std::size_t c = 0;
            while (c + 1 < build.curves.size() && cum[c + 1] <= pick) ++c;
            const auto [p, dir] = detail::curve_point_by_length(
                build.curves[c], rng.uniform(), rng);
            points[i] = p;
            normals[i] = dir;
            source_curve[i] = static_cast<int>(c);
        }
    } else {
        double total_area = 0.0;
        for (const auto& patch : build.patches) total_area += patch.area;
        for (int i = 0; i < n; ++i) {
            double pick = rng.uniform() * total_area;
            std::size_t pi = 0;
            while (pi + 1 < build.patches.size() && pick > build.patches[pi].area) {
                pick -= build.patches[pi].area;
                ++pi;
            }
            const auto& patch = build.patches[pi];
            switch (patch.kind) {
                case detail::SurfacePatch::Rect: {
                    points[i] = patch.origin + patch.e1 * rng.uniform() + patch.e2 * rng.uniform();
                    normals[i] = patch.normal;
                    break;
                }
                case detail::SurfacePatch::Lateral: {
                    const double a = rng.uniform(0.0, kTwoPi);
                    const double h = rng.uniform() * patch.height;
                    const Vec3 radial = patch.e1 * std::cos(a) + patch.e2 * std::sin(a);
                    points[i] = patch.origin + patch.axis * h + radial * patch.radius;
                    normals[i] = radial;
                    break;
                }
                case detail::SurfacePatch::Cap: {
                    const double rr = patch.radius * std::sqrt(rng.uniform());
                    const double a = rng.uniform(0.0, kTwoPi);
                    points[i] = patch.origin + (patch.e1 * std::cos(a) + patch.e2 * std::sin(a)) * rr;
                    normals[i] = patch.normal;
                    break;
                }
            }
        }
    }

    SyntheticScene scene;
    scene.spec = spec;
    scene.curves = build.curves;
    scene.corners = build.corners;
    scene.normals = normals;
    scene.cloud = PointCloud(points);
    scene.feature_size = median_nn_spacing(points);

    // 1.5x the mean point spacing; for random surface sampling the median
    // nearest-neighbor distance underestimates the spacing by about half
    const double band = 3.0 * scene.feature_size;
    auto& gt = scene.gt;
    gt.edge_label.assign(n, 0);
    gt.corner_label.assign(n, 0);
    gt.edge_offset.assign(n, Vec3{});
    gt.corner_offset.assign(n, Vec3{});
    gt.curve_id.assign(n, -1);

    for (int i = 0; i < n; ++i) {
        if (spec.kind == SolidKind::WireframeOnly) {
            gt.edge_label[i] = 1;
            gt.curve_id[i] = source_curve[i];
            gt.edge_offset[i] =
                nearest_point_on_curve(points[i], build.curves[source_curve[i]]) - points[i];
        } else {
            double best = std::numeric_limits<double>::max();
            int best_c = -1;
            Point3 best_q{};
            for (std::size_t c = 0; c < build.curves.size(); ++c) {
                const Point3 q = nearest_point_on_curve(points[i], build.curves[c]);
                const double d = dist(points[i], q);
                if (d < best) {
                    best = d;
                    best_c = static_cast<int>(c);
                    best_q = q;
                }
            }
            if (best_c >= 0 && best < band) {
                gt.edge_label[i] = 1;
                gt.curve_id[i] = best_c;
                gt.edge_offset[i] = best_q - points[i];
            }
        }
        double cbest = std::numeric_limits<double>::max();
        const Point3* cq = nullptr;
        for (const auto& c : build.corners) {
            const double d = dist(points[i], c);
            if (d < cbest) {
                cbest = d;
                cq = &c;
            }
        }
        if (cq && cbest < band) {
            gt.corner_label[i] = 1;
            gt.corner_offset[i] = *cq - points[i];
        }
    }

    // sparse sampling can leave a corner with no point inside the band; the
    // nearest unlabeled point is promoted so every corner has a candidate
    for (const auto& corner : build.corners) {
        bool covered = false;
        for (int i = 0; i < n && !covered; ++i)
            covered = gt.corner_label[i] &&
                      dist(points[i] + gt.corner_offset[i], corner) < 1e-9;
        if (covered) continue;
        int nearest = -1;
        double best = std::numeric_limits<double>::max();
        for (int i = 0; i < n; ++i) {
            if (gt.corner_label[i]) continue;
            const double d = dist(points[i], corner);
            if (d < best) {
                best = d;
                nearest = i;
            }
        }
        if (nearest >= 0 && !gt.corner_label[nearest]) {
            gt.corner_label[nearest] = 1;
            gt.corner_offset[nearest] = corner - points[nearest];
            if (!gt.edge_label[nearest]) {
                double cb = std::numeric_limits<double>::max();
                int cc = -1;
                Point3 cq2{};
                for (std::size_t c = 0; c < build.curves.size(); ++c) {
                    const Point3 q = nearest_point_on_curve(points[nearest], build.curves[c]);
                    const double d = dist(points[nearest], q);
                    if (d < cb) {
                        cb = d;
                        cc = static_cast<int>(c);
                        cq2 = q;
                    }
                }
                gt.edge_label[nearest] = 1;
                gt.curve_id[nearest] = cc;
                gt.edge_offset[nearest] = cq2 - points[nearest];
            }
        }
    }

    scene.local_size.resize(n);
    for (int i = 0; i < n; ++i) {
        double nearest_curve = std::numeric_limits<double>::max();
        for (const auto& c : build.curves)
            nearest_curve = std::min(nearest_curve, dist_point_curve(points[i], c));
        scene.local_size[i] = std::max(scene.feature_size, nearest_curve);
    }

    // fixture quality: every curve must receive labeled support
    for (std::size_t c = 0; c < build.curves.size(); ++c) {
        int count = 0;
        for (int i = 0; i < n; ++i)
            if (gt.curve_id[i] == static_cast<int>(c)) ++count;
        if (count < 4)
            throw InfeasibleSpec("generate: a curve received too few labeled points");
    }

    if (spec.noise_x > 0.0) return add_noise(scene, spec.noise_x);
    return scene;
}

// Displace every point along its stored direction by a uniform draw in
// [-x, x] times the local feature size.  Labels and offsets stay bound to the
// clean geometry.
inline SyntheticScene add_noise(const SyntheticScene& scene, double x) {
    if (x < 0.0) throw Error("add_noise: x must be >= 0");
    SyntheticScene out = scene;
    out.spec.noise_x = x;
    if (x == 0.0) return out;
    Rng rng(scene.spec.seed ^ 0x6e6f697365ull);  // generation-independent stream
    std::vector<Point3> pts = scene.cloud.points();
    for (std::size_t i = 0; i < pts.size(); ++i)
        pts[i] += scene.normals[i] * (rng.uniform(-x, x) * scene.local_size[i]);
    out.cloud = PointCloud(pts);
    return out;
}

// Seeded uniform-random (or FPS) subset with labels carried over.  The salt
// varies the draw without touching the scene seed.
inline SyntheticScene subsample(const SyntheticScene& scene, int p, bool use_fps = false,
                                std::uint64_t salt = 0) {
    const int n = static_cast<int>(scene.cloud.size());
    if (p > n) throw PTooLarge("subsample: P exceeds the cloud size");
    if (p <= 0) throw Error("subsample: P must be positive");
    if (p == n) return scene;

    std::vector<int> keep;
    if (use_fps) {
        keep = farthest_point_sample(scene.cloud.points(), p, 0);
    } else {
        Rng rng(scene.spec.seed ^ 0x737562ull ^ (std::uint64_t(p) << 20) ^ salt);
        std::vector<int> pool(n);
        std::iota(pool.begin(), pool.end(), 0);
        for (int k = 0; k < p; ++k) {
            const std::size_t pick = k + rng.below(pool.size() - k);
            std::swap(pool[k], pool[pick]);
        }
        keep.assign(pool.begin(), pool.begin() + p);
    }
    std::sort(keep.begin(), keep.end());

    SyntheticScene out;
    out.spec = scene.spec;
    out.spec.n_points = p;
    out.curves = scene.curves;
    out.corners = scene.corners;
    std::vector<Point3> pts;
    pts.reserve(p);
    out.normals.reserve(p);
    auto& gt = out.gt;
    for (int i : keep) {
        pts.push_back(scene.cloud[i]);
        out.normals.push_back(scene.normals[i]);
        out.local_size.push_back(scene.local_size[i]);
        gt.edge_label.push_back(scene.gt.edge_label[i]);
        gt.corner_label.push_back(scene.gt.corner_label[i]);
        gt.edge_offset.push_back(scene.gt.edge_offset[i]);
        gt.corner_offset.push_back(scene.gt.corner_offset[i]);
        gt.curve_id.push_back(scene.gt.curve_id[i]);
    }
    out.cloud = PointCloud(pts);
    out.feature_size = median_nn_spacing(pts);
    return out;
}

}  // namespace featcurve

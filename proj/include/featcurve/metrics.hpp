#pragma once

#include <vector>

#include "featcurve/geometry.hpp"

namespace featcurve {

struct EvalReport {
    double ecd = 0.0;
    double iou = 0.0;
    double precision = 0.0;
    double recall = 0.0;
    long tp = 0, fp = 0, fn = 0;
};

// Set-based TP/FP/FN plus the three ratios.  Empty-denominator conventions:
// a metric is 1 when both sets are empty and 0 when only its denominator is.
inline EvalReport edge_classification_metrics(const std::vector<int>& predicted,
                                              const std::vector<int>& gt) {
    std::vector<int> p = predicted, g = gt;
    std::sort(p.begin(), p.end());
    p.erase(std::unique(p.begin(), p.end()), p.end());
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());

    std::size_t inter = 0, ip = 0, ig = 0;
    while (ip < p.size() && ig < g.size()) {
        if (p[ip] == g[ig]) {
            ++inter;
            ++ip;
            ++ig;
        } else if (p[ip] < g[ig]) {
            ++ip;
        } else {
            ++ig;
        }
    }
    EvalReport r;
    r.tp = static_cast<long>(inter);
    r.fp = static_cast<long>(p.size() - inter);
    r.fn = static_cast<long>(g.size() - inter);
    const bool both_empty = p.empty() && g.empty();
    auto ratio = [&](long num, long den) {
        if (den == 0) return both_empty ? 1.0 : 0.0;
        return double(num) / double(den);
    };
    r.iou = ratio(r.tp, r.tp + r.fp + r.fn);
    r.precision = ratio(r.tp, r.tp + r.fp);
    r.recall = ratio(r.tp, r.tp + r.fn);
    return r;
}

namespace detail {

// Full circles carry an arbitrary in-plane frame; resample them from a frame
// derived from the geometry alone so equal circles produce equal sample sets
// (even counts keep the set invariant under axis flips).
inline ParametricCurve metric_canonical(const ParametricCurve& c) {
    if (c.kind() != CurveKind::Circle || !c.circle().full()) return c;
    CircleCanonical cc = c.circle();
    const double ax = std::abs(cc.n.x), ay = std::abs(cc.n.y), az = std::abs(cc.n.z);
    const double lead = ax >= ay && ax >= az ? cc.n.x : (ay >= az ? cc.n.y : cc.n.z);
    if (lead < 0.0) cc.n = -cc.n;
    cc.u = any_orthogonal(cc.n);
    cc.v = cc.u.cross(cc.n);
    return make_circle(cc);
}

// length-proportional sampling of a curve list after uniform scaling
inline std::vector<Point3> sample_curve_set(const std::vector<ParametricCurve>& curves,
                                            double scale, double samples_per_unit,
                                            int min_per_curve) {
    std::vector<Point3> out;
    for (const auto& raw : curves) {
        const ParametricCurve c = metric_canonical(raw);
        const double len = curve_length(c) * scale;
        int m = std::max(min_per_curve, static_cast<int>(std::ceil(samples_per_unit * len)));
        m += m % 2;
        for (const auto& p : sample_curve(c, m)) out.push_back(p * scale);
    }
    return out;
}

}  // namespace detail

// Chamfer distance between dense samplings of the two curve sets, measured
// after scaling both by the ground-truth sampling's bounding-box diagonal.
inline double edge_chamfer_distance(const std::vector<ParametricCurve>& predicted,
                                    const std::vector<ParametricCurve>& gt,
                                    double samples_per_unit = 256.0,
                                    int min_per_curve = 16) {
    if (predicted.empty() || gt.empty())
        throw EmptyCurveSet("edge_chamfer_distance: empty curve set");
    std::vector<Point3> gt_probe;
    for (const auto& c : gt)
        for (const auto& p : sample_curve(c, 64)) gt_probe.push_back(p);
    const double diag = bounding_box(gt_probe).diagonal();
    const double scale = diag > 0.0 ? 1.0 / diag : 1.0;

    const auto ps = detail::sample_curve_set(predicted, scale, samples_per_unit, min_per_curve);
    const auto gs = detail::sample_curve_set(gt, scale, samples_per_unit, min_per_curve);
    return chamfer_distance(ps, gs);
}

}  // namespace featcurve

#pragma once

#include <atomic>
#include <numeric>
#include <optional>
#include <thread>
#include <vector>

#include "featcurve/detection.hpp"
#include "featcurve/geometry.hpp"
#include "featcurve/numeric.hpp"

namespace featcurve {

// ---------------------------------------------------------------------------
// Corner pairs
// ---------------------------------------------------------------------------

struct CornerPair {
    int i = -1, j = -1;  // indices into the corner list
    Point3 c1, c2;
    Point3 center;       // (c1+c2)/2
    double radius = 0;   // ||c1-c2||/2
};

inline std::vector<CornerPair> enumerate_pairs(const std::vector<Corner>& corners) {
    if (corners.size() < 2) throw TooFewCorners("enumerate_pairs: need at least two corners");
    std::vector<CornerPair> out;
    out.reserve(corners.size() * (corners.size() - 1) / 2);
    for (std::size_t i = 0; i + 1 < corners.size(); ++i) {
        for (std::size_t j = i + 1; j < corners.size(); ++j) {
            CornerPair p;
            p.i = static_cast<int>(i);
            p.j = static_cast<int>(j);
            p.c1 = corners[i].position;
            p.c2 = corners[j].position;
            p.center = (p.c1 + p.c2) * 0.5;
            p.radius = 0.5 * dist(p.c1, p.c2);
            out.push_back(p);
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Config / proposal types
// ---------------------------------------------------------------------------

struct ProposalConfig {
    double radius_scale = 1.0;   // sphere radius multiplier (ablation: 1.5, 3)
    int sample_k = 64;           // candidate subset cardinality
    double segment_tol = 0.03;   // segmentation distance, relative to pair radius
    int em_iters = 3;            // fit / re-segment alternations
    double w_m = 1.0, w_c = 1.0, w_p = 10.0;
    double min_coverage = 0.5;   // curve-bin coverage below which a pair is rejected
    double min_member_fraction = 0.25;  // members required, as a share of the candidates
    double max_support_gap = 0.25;  // largest tolerated unsupported stretch
    double corner_clearance = 0.4;  // min curve distance to foreign corners, times R
    int curve_samples = 32;      // samples for objectives and coverage bins
    bool fps_subsample = true;   // false -> seeded uniform-random subset
};

struct OpenProposal {
    CornerPair pair;
    std::vector<int> members;        // edge-set indices (segmentation mask)
    std::vector<int> member_local;   // same members, as indices into the candidate subset
    CurveKind type = CurveKind::Line;
    ParametricCurve curve;           // endpoints pinned to c1, c2
    double fit_residual = 0;         // mean exact member-to-curve distance
    double coverage = 0;             // fraction of curve bins holding a member
    double support_gap = 0;          // largest unsupported stretch, fraction of length
    std::vector<double> em_trace;    // accepted residual per EM iteration
};

// ---------------------------------------------------------------------------
// Sphere subsampling
// ---------------------------------------------------------------------------

// Candidates within radius_scale*R of the pair midpoint, reduced to at most
// sample_k (FPS seeded at the candidate nearest c1, or a seeded uniform
// subset).  Returns local indices into edge_pos, ascending.
inline std::vector<int> sphere_subsample(const std::vector<Point3>& edge_pos,
                                         const CornerPair& pair, const ProposalConfig& cfg,
                                         std::uint64_t seed = 0) {
    const double r = cfg.radius_scale * pair.radius;
    std::vector<int> cand;
    for (std::size_t i = 0; i < edge_pos.size(); ++i)
        if (dist(edge_pos[i], pair.center) <= r) cand.push_back(static_cast<int>(i));
    if (static_cast<int>(cand.size()) <= cfg.sample_k) return cand;

    std::vector<int> keep;
    if (cfg.fps_subsample) {
        std::vector<Point3> pts(cand.size());
        for (std::size_t k = 0; k < cand.size(); ++k) pts[k] = edge_pos[cand[k]];
        int seed_local = 0;
        double best = std::numeric_limits<double>::max();
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const double d = dist2(pts[k], pair.c1);
            if (d < best) {
                best = d;
                seed_local = static_cast<int>(k);
            }
        }
        for (int k : farthest_point_sample(pts, cfg.sample_k, seed_local))
            keep.push_back(cand[k]);
    } else {
        Rng rng(seed ^ (std::uint64_t(pair.i) << 32) ^ std::uint64_t(pair.j));
        std::vector<int> pool = cand;
        for (int k = 0; k < cfg.sample_k; ++k) {
            const std::size_t pick = k + rng.below(pool.size() - k);
            std::swap(pool[k], pool[pick]);
        }
        keep.assign(pool.begin(), pool.begin() + cfg.sample_k);
    }
    std::sort(keep.begin(), keep.end());
    return keep;
}

// ---------------------------------------------------------------------------
// Per-type fits (endpoints pinned to the pair corners)
// ---------------------------------------------------------------------------

namespace detail {

inline double dist_point_polyline(const Point3& p, const std::vector<Point3>& poly) {
    double best = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i + 1 < poly.size(); ++i) {
        const Vec3 seg = poly[i + 1] - poly[i];
        const double len2 = seg.norm2();
        const double t = len2 > 0.0 ? std::clamp((p - poly[i]).dot(seg) / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, dist2(p, poly[i] + seg * t));
    }
    return std::sqrt(best);
}

inline double open_fit_objective(const ParametricCurve& curve,
                                 const std::vector<Point3>& members, int curve_samples) {
    // splines share one sampled polyline across all members; lines and
    // circles use their closed-form distances
    const bool polyline_path = curve.kind() == CurveKind::BSpline;
    const auto samples = sample_curve(curve, polyline_path ? std::max(64, curve_samples)
                                                           : curve_samples);
    double to_curve = 0.0;
    for (const auto& m : members)
        to_curve += polyline_path ? dist_point_polyline(m, samples) : dist_point_curve(m, curve);
    to_curve /= double(members.size());

    double to_members = 0.0;
    for (const auto& s : samples) {
        double best = std::numeric_limits<double>::max();
        for (const auto& m : members) best = std::min(best, dist2(s, m));
        to_members += std::sqrt(best);
    }
    to_members /= double(samples.size());
    return to_curve + to_members;
}

// Circle through both corners and a free point on their bisector plane,
// restricted to the arc passing nearest the members' angular median.
inline CircleCanonical arc_through_corners(const Point3& c1, const Point3& c2,
                                           const Point3& q,
                                           const std::vector<Point3>& members) {
    CircleCanonical circle = circle_from_three_points(c1, c2, q);
    const double theta2 = circle.angle_of(c2);
    std::vector<double> ang;
    ang.reserve(members.size());
    for (const auto& m : members) ang.push_back(circle.angle_of(m));
    std::sort(ang.begin(), ang.end());
    const double median = ang.empty() ? 0.5 * theta2 : ang[(ang.size() - 1) / 2];
    CircleCanonical arc = median <= theta2 ? circle.with_start(c1, theta2)
                                           : circle.with_start(c2, kTwoPi - theta2);
    arc.provenance = circle.provenance;
    return arc;
}

inline ParametricCurve fit_arc(const CornerPair& pair, const std::vector<Point3>& members,
                               const ProposalConfig& cfg) {
    const Vec3 d = (pair.c2 - pair.c1).normalized();
    const Vec3 e1 = any_orthogonal(d);
    const Vec3 e2 = d.cross(e1).normalized();
    const double R = pair.radius;

    // init: the member bulging farthest from the chord, on the bisector plane
    double bulge = 0.0;
    Point3 farby{};
    for (const auto& m : members) {
        const Vec3 w = m - pair.c1;
        const double off = (w - d * w.dot(d)).norm();
        if (off > bulge) {
            bulge = off;
            farby = m;
        }
    }
    if (bulge < 1e-7 * R)
        throw DegenerateFit("fit_arc: members collinear with the corner chord");
    const Vec3 rel = farby - pair.center;
    double s0 = rel.dot(e1), t0 = rel.dot(e2);
    if (std::hypot(s0, t0) < 1e-6 * R) {
        s0 = bulge;  // bulge point sits on the chord axis plane; nudge off it
        t0 = 0.0;
    }

    auto objective = [&](const std::vector<double>& x) {
        if (std::hypot(x[0], x[1]) < 1e-6 * R) return 1e30;
        const Point3 q = pair.center + e1 * x[0] + e2 * x[1];
        CircleCanonical arc;
        try {
            arc = arc_through_corners(pair.c1, pair.c2, q, members);
        } catch (const Error&) {
            return 1e30;
        }
        if (arc.r > 1e4 * R) return 1e30;
        return open_fit_objective(make_circle(arc), members, cfg.curve_samples);
    };

    NelderMeadOptions opt;
    opt.max_evals = 220;
    const auto coarse =
        nelder_mead(objective, {s0, t0}, std::max(0.25 * bulge, 0.02 * R), opt);
    if (coarse.fx >= 1e29) throw DegenerateFit("fit_arc: arc optimization collapsed");

    // member-distance polish removes the coverage leg's clump bias
    auto member_leg = [&](const std::vector<double>& x) {
        if (std::hypot(x[0], x[1]) < 1e-6 * R) return 1e30;
        const Point3 q = pair.center + e1 * x[0] + e2 * x[1];
        try {
            const CircleCanonical arc = arc_through_corners(pair.c1, pair.c2, q, members);
            if (arc.r > 1e4 * R) return 1e30;
            double sum = 0.0;
            for (const auto& m : members) sum += dist_point_circle(m, arc);
            return sum / double(members.size());
        } catch (const Error&) {
            return 1e30;
        }
    };
    NelderMeadOptions polish_opt;
    polish_opt.max_evals = 140;
    const auto res = nelder_mead(member_leg, coarse.x, 0.002 * R, polish_opt);
    if (res.fx >= 1e29) throw DegenerateFit("fit_arc: arc optimization collapsed");
    const Point3 q = pair.center + e1 * res.x[0] + e2 * res.x[1];
    return make_circle(arc_through_corners(pair.c1, pair.c2, q, members));
}

inline ParametricCurve fit_bspline(const CornerPair& pair, const std::vector<Point3>& members,
                                   const ProposalConfig& cfg) {
    const Vec3 chord = pair.c2 - pair.c1;
    const double clen2 = chord.norm2();

    // order members along the chord, then chord-length parameterize
    std::vector<int> order(members.size());
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> proj(members.size());
    for (std::size_t i = 0; i < members.size(); ++i)
        proj[i] = (members[i] - pair.c1).dot(chord) / clen2;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return proj[a] < proj[b]; });

    std::vector<double> u(members.size(), 0.0);
    double total = 0.0;
    for (std::size_t k = 1; k < order.size(); ++k) {
        total += dist(members[order[k]], members[order[k - 1]]);
        u[k] = total;
    }
    CubicBSpline init{{pair.c1, pair.c1 + chord / 3.0, pair.c1 + chord * (2.0 / 3.0), pair.c2}};
    if (total > 0.0) {
        for (auto& x : u) x /= total;
        // least squares for the two interior control points at fixed parameters
        double a11 = 0, a12 = 0, a22 = 0;
        Vec3 r1{}, r2{};
        for (std::size_t k = 0; k < order.size(); ++k) {
            const auto b = bspline_basis4(u[k]);
            const Vec3 resid = members[order[k]] - pair.c1 * b[0] - pair.c2 * b[3];
            a11 += b[1] * b[1];
            a12 += b[1] * b[2];
            a22 += b[2] * b[2];
            r1 += resid * b[1];
            r2 += resid * b[2];
        }
        const double det = a11 * a22 - a12 * a12;
        if (std::abs(det) > 1e-12 * std::max(1.0, a11 * a22)) {
            init.control[1] = (r1 * a22 - r2 * a12) / det;
            init.control[2] = (r2 * a11 - r1 * a12) / det;
        }
    }

    auto objective = [&](const std::vector<double>& x) {
        const CubicBSpline s{{pair.c1, Point3{x[0], x[1], x[2]}, Point3{x[3], x[4], x[5]},
                              pair.c2}};
        return open_fit_objective(make_bspline(s), members, cfg.curve_samples);
    };
    NelderMeadOptions opt;
    opt.max_evals = 280;
    const std::vector<double> x0{init.control[1].x, init.control[1].y, init.control[1].z,
                                 init.control[2].x, init.control[2].y, init.control[2].z};
    const auto coarse = nelder_mead(objective, x0, 0.05 * pair.radius, opt);

    auto member_leg = [&](const std::vector<double>& x) {
        const CubicBSpline s{{pair.c1, Point3{x[0], x[1], x[2]}, Point3{x[3], x[4], x[5]},
                              pair.c2}};
        const auto poly = sample_bspline(s, 64);
        double sum = 0.0;
        for (const auto& m : members) sum += dist_point_polyline(m, poly);
        return sum / double(members.size());
    };
    NelderMeadOptions polish_opt;
    polish_opt.max_evals = 180;
    const auto res = nelder_mead(member_leg, coarse.x, 0.004 * pair.radius, polish_opt);
    return make_bspline(CubicBSpline{{pair.c1, Point3{res.x[0], res.x[1], res.x[2]},
                                      Point3{res.x[3], res.x[4], res.x[5]}, pair.c2}});
}

inline ParametricCurve fit_curve_of_type(CurveKind type, const CornerPair& pair,
                                         const std::vector<Point3>& members,
                                         const ProposalConfig& cfg) {
    switch (type) {
        case CurveKind::Line: return make_line(pair.c1, pair.c2);
        case CurveKind::Circle: return fit_arc(pair, members, cfg);
        default: return fit_bspline(pair, members, cfg);
    }
}

struct EmFit {
    ParametricCurve curve;
    std::vector<int> member_local;
    double residual = 0;
    std::vector<double> trace;
};

// Alternate fitting and re-segmentation, keeping the best iterate so the
// reported residual never increases across iterations.
inline std::optional<EmFit> fit_with_em(CurveKind type, const CornerPair& pair,
                                        const std::vector<Point3>& candidates,
                                        const ProposalConfig& cfg) {
    const double tol = cfg.segment_tol * pair.radius;
    std::vector<Point3> members = candidates;
    std::optional<EmFit> best;
    for (int it = 0; it < cfg.em_iters; ++it) {
        ParametricCurve curve;
        try {
            curve = fit_curve_of_type(type, pair, members, cfg);
        } catch (const Error&) {
            break;
        }
        std::vector<int> kept;
        double sum = 0.0;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            const double d = dist_point_curve(candidates[i], curve);
            if (d < tol) {
                kept.push_back(static_cast<int>(i));
                sum += d;
            }
        }
        if (kept.empty()) break;
        const double residual = sum / double(kept.size());
        if (best && residual >= best->residual) break;
        EmFit fit;
        fit.curve = curve;
        fit.member_local = kept;
        fit.residual = residual;
        fit.trace = best ? best->trace : std::vector<double>{};
        fit.trace.push_back(residual);
        best = std::move(fit);
        members.clear();
        for (int i : kept) members.push_back(candidates[i]);
        if (type == CurveKind::Line) break;  // line has no free parameters
    }
    return best;
}

inline double curve_coverage(const ParametricCurve& curve,
                             const std::vector<Point3>& members, int bins) {
    // a proposal with m members can cover at most m bins; resolution adapts
    bins = std::clamp(static_cast<int>(members.size()) / 2, 8, bins);
    const auto samples = sample_curve_arclength(curve, bins);
    std::vector<char> hit(samples.size(), 0);
    for (const auto& m : members) {
        int best = 0;
        double best_d2 = std::numeric_limits<double>::max();
        for (std::size_t s = 0; s < samples.size(); ++s) {
            const double d2 = dist2(m, samples[s]);
            if (d2 < best_d2) {
                best_d2 = d2;
                best = static_cast<int>(s);
            }
        }
        hit[best] = 1;
    }
    int count = 0;
    for (char h : hit) count += h;
    return double(count) / double(samples.size());
}

// Largest stretch of the curve without member support, as a fraction of its
// length (end stretches count; curves need support out to their corners).
inline double max_support_gap(const ParametricCurve& curve,
                              const std::vector<Point3>& members, int bins = 64) {
    const auto samples = sample_curve_arclength(curve, bins);
    const int m = static_cast<int>(samples.size());
    std::vector<int> hit;
    hit.reserve(members.size());
    for (const auto& p : members) {
        int best = 0;
        double best_d2 = std::numeric_limits<double>::max();
        for (int s = 0; s < m; ++s) {
            const double d2 = dist2(p, samples[s]);
            if (d2 < best_d2) {
                best_d2 = d2;
                best = s;
            }
        }
        hit.push_back(best);
    }
    if (hit.empty()) return 1.0;
    std::sort(hit.begin(), hit.end());
    hit.erase(std::unique(hit.begin(), hit.end()), hit.end());
    int worst = std::max(hit.front(), m - 1 - hit.back());
    for (std::size_t k = 1; k < hit.size(); ++k)
        worst = std::max(worst, hit[k] - hit[k - 1] - 1);
    return double(worst) / double(m);
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Proposal fitting
// ---------------------------------------------------------------------------

// One best-fit open curve for the pair: each type is fit with em_iters
// fit/re-segment rounds, the winner is the minimal final residual with ties
// going to the simpler type (line > circle > B-spline).
inline OpenProposal fit_open_curve(const CornerPair& pair,
                                   const std::vector<Point3>& candidates,
                                   const std::vector<int>& candidate_edge_ids,
                                   const ProposalConfig& cfg = {}) {
    if (candidates.empty()) throw EmptyMembers("fit_open_curve: no candidate points");
    if (candidates.size() != candidate_edge_ids.size())
        throw LengthMismatch("fit_open_curve: candidate arrays differ");

    struct Candidate {
        CurveKind type;
        detail::EmFit fit;
    };
    std::vector<Candidate> fits;
    for (CurveKind type : {CurveKind::Line, CurveKind::Circle, CurveKind::BSpline}) {
        auto fit = detail::fit_with_em(type, pair, candidates, cfg);
        if (fit) fits.push_back({type, std::move(*fit)});
    }
    if (fits.empty()) throw EmptyMembers("fit_open_curve: no point survives segmentation");

    // a type only competes on residual with real membership support; a line
    // keeping just the two corner points must not beat a spline keeping all
    std::size_t max_members = 0;
    for (const auto& f : fits) max_members = std::max(max_members, f.fit.member_local.size());
    const std::size_t support_floor = (max_members + 1) / 2;

    const double tie_eps = 1e-6 * pair.radius;
    std::size_t best = fits.size();
    for (std::size_t k = 0; k < fits.size(); ++k) {
        if (fits[k].fit.member_local.size() < support_floor) continue;
        if (best == fits.size() ||
            fits[k].fit.residual < fits[best].fit.residual - tie_eps)
            best = k;
    }
    if (best == fits.size()) best = 0;  // unreachable: the max-support fit qualifies

    OpenProposal out;
    out.pair = pair;
    out.type = fits[best].type;
    out.curve = fits[best].fit.curve;
    out.fit_residual = fits[best].fit.residual;
    out.em_trace = fits[best].fit.trace;
    out.member_local = fits[best].fit.member_local;
    for (int i : out.member_local) out.members.push_back(candidate_edge_ids[i]);
    std::vector<Point3> member_pos;
    for (int i : out.member_local) member_pos.push_back(candidates[i]);
    out.coverage = detail::curve_coverage(out.curve, member_pos, cfg.curve_samples);
    out.support_gap = detail::max_support_gap(out.curve, member_pos);
    return out;
}

// ---------------------------------------------------------------------------
// Composite proposal loss against ground truth
// ---------------------------------------------------------------------------

struct GtCurve {
    ParametricCurve curve;
    int id = -1;
};

// Composite w_m*L_mask + w_c*L_cls + w_p*L_para with indicator surrogates for
// the classification terms and Chamfer distance between curve samplings for
// the parameter term.  The ground-truth curve is matched by endpoint
// proximity; candidate_gt_ids holds the curve id of each candidate point.
inline double proposal_loss_eval(const OpenProposal& p,
                                 const std::vector<Point3>& candidates,
                                 const std::vector<int>& candidate_gt_ids,
                                 const std::vector<GtCurve>& gt_curves,
                                 const ProposalConfig& cfg = {},
                                 double match_tol = 1e-6) {
    if (candidates.size() != candidate_gt_ids.size())
        throw LengthMismatch("proposal_loss_eval: candidate arrays differ");
    const GtCurve* matched = nullptr;
    for (const auto& g : gt_curves) {
        const auto ends = curve_endpoints(g.curve);
        if (!ends) continue;
        const bool fwd = dist(ends->first, p.pair.c1) <= match_tol &&
                         dist(ends->second, p.pair.c2) <= match_tol;
        const bool rev = dist(ends->first, p.pair.c2) <= match_tol &&
                         dist(ends->second, p.pair.c1) <= match_tol;
        if (fwd || rev) {
            matched = &g;
            break;
        }
    }
    if (!matched) throw NoMatchingGtCurve("proposal_loss_eval: no gt curve shares endpoints");

    std::vector<char> predicted(candidates.size(), 0);
    for (int i : p.member_local) predicted[i] = 1;
    double mask_err = 0.0;
    for (std::size_t i = 0; i < candidates.size(); ++i) {
        const bool gt_member = candidate_gt_ids[i] == matched->id;
        if (gt_member != (predicted[i] != 0)) mask_err += 1.0;
    }
    const double l_mask = mask_err / double(candidates.size());
    const double l_cls = p.type == matched->curve.kind() ? 0.0 : 1.0;
    const double l_para =
        chamfer_distance(sample_curve(p.curve, 64), sample_curve(matched->curve, 64));
    return cfg.w_m * l_mask + cfg.w_c * l_cls + cfg.w_p * l_para;
}

// ---------------------------------------------------------------------------
// Batch proposal generation (deterministic parallel map over pairs)
// ---------------------------------------------------------------------------

inline std::vector<OpenProposal> propose_open(const std::vector<Point3>& edge_pos,
                                              const std::vector<int>& edge_idx,
                                              const std::vector<Corner>& corners,
                                              const ProposalConfig& cfg = {},
                                              std::uint64_t seed = 0, int workers = 1) {
    std::vector<OpenProposal> out;
    if (corners.size() < 2) return out;
    const auto pairs = enumerate_pairs(corners);
    std::vector<std::optional<OpenProposal>> slots(pairs.size());

    auto run_pair = [&](std::size_t k) {
        const auto& pair = pairs[k];
        if (pair.radius <= 0.0) return;
        const auto cand_local = sphere_subsample(edge_pos, pair, cfg, seed);
        if (cand_local.empty()) return;
        std::vector<Point3> cand_pos;
        std::vector<int> cand_ids;
        cand_pos.reserve(cand_local.size());
        for (int i : cand_local) {
            cand_pos.push_back(edge_pos[i]);
            cand_ids.push_back(edge_idx[i]);
        }
        try {
            auto prop = fit_open_curve(pair, cand_pos, cand_ids, cfg);
            if (prop.coverage < cfg.min_coverage) return;
            if (prop.support_gap > cfg.max_support_gap) return;
            if (double(prop.members.size()) < cfg.min_member_fraction * double(cand_pos.size()))
                return;
            // a curve threading a corner that is not one of its endpoints
            // contradicts the corner-pair model (curves terminate at corners)
            if (cfg.corner_clearance > 0.0) {
                for (std::size_t c = 0; c < corners.size(); ++c) {
                    if (static_cast<int>(c) == pair.i || static_cast<int>(c) == pair.j)
                        continue;
                    if (dist_point_curve(corners[c].position, prop.curve) <
                        cfg.corner_clearance * pair.radius)
                        return;
                }
            }
            slots[k] = std::move(prop);
        } catch (const EmptyMembers&) {
        } catch (const DegenerateFit&) {
        }
    };

    if (workers <= 1) {
        for (std::size_t k = 0; k < pairs.size(); ++k) run_pair(k);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t k = next.fetch_add(1); k < pairs.size();
                     k = next.fetch_add(1))
                    run_pair(k);
            });
        for (auto& t : pool) t.join();
    }
    for (auto& s : slots)
        if (s) out.push_back(std::move(*s));
    return out;
}

}  // namespace featcurve

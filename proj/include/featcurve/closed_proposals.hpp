#pragma once

#include <vector>

#include "featcurve/geometry.hpp"
#include "featcurve/numeric.hpp"

namespace featcurve {

// ---------------------------------------------------------------------------
// Feature embeddings and the similarity matrix
// ---------------------------------------------------------------------------

// One fixed-dimension feature vector per edge point; rows of pairwise feature
// distance form the similarity matrix whose thresholded rows are proposals.
struct FeatureEmbedding {
    std::size_t dim = 0;
    std::vector<double> data;  // row-major, size = count * dim

    std::size_t count() const { return dim ? data.size() / dim : 0; }
    const double* row(std::size_t i) const { return data.data() + i * dim; }

    double distance(std::size_t i, std::size_t j) const {
        const double* a = row(i);
        const double* b = row(j);
        double s = 0.0;
        for (std::size_t k = 0; k < dim; ++k) {
            const double d = a[k] - b[k];
            s += d * d;
        }
        return std::sqrt(s);
    }
};

struct SimilarityMatrix {
    std::size_t m = 0;
    std::vector<double> s;  // row-major m*m

    double at(std::size_t i, std::size_t j) const { return s[i * m + j]; }
};

struct ClosedConfig {
    double k_margin = 100.0;        // dissimilarity margin K
    double s_bar = 50.0;            // row threshold, default 0.5*K
    int min_members = 8;
    int feature_knn = 12;           // neighborhood for geometric features
    bool oracle_features = false;   // one-hot curve ids instead of geometry
};

inline SimilarityMatrix build_similarity(const FeatureEmbedding& f) {
    const std::size_t m = f.count();
    SimilarityMatrix out;
    out.m = m;
    out.s.assign(m * m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) {
            const double d = f.distance(i, j);
            out.s[i * m + j] = d;
            out.s[j * m + i] = d;
        }
    }
    return out;
}

// Sum over ordered same-curve pairs of S_ij plus ordered different-curve
// pairs of max(0, K - S_ij).  Pairs where both points lack a curve id are
// unsupervised and skipped; id-vs-none counts as a different-curve pair.
inline double similarity_loss(const SimilarityMatrix& s, const std::vector<int>& curve_id,
                              double k_margin) {
    if (curve_id.size() != s.m) throw LengthMismatch("similarity_loss: id count != matrix size");
    double loss = 0.0;
    for (std::size_t i = 0; i < s.m; ++i) {
        for (std::size_t j = 0; j < s.m; ++j) {
            if (i == j) continue;
            const int a = curve_id[i], b = curve_id[j];
            if (a < 0 && b < 0) continue;
            if (a == b)
                loss += s.at(i, j);
            else
                loss += std::max(0.0, k_margin - s.at(i, j));
        }
    }
    return loss;
}

// ---------------------------------------------------------------------------
// Row proposals
// ---------------------------------------------------------------------------

struct ClusterCandidate {
    int seed = -1;             // row index (edge-point local index)
    std::vector<int> members;  // local indices with S_seed,j < s_bar
};

// One candidate per row m: everything nearer than s_bar in feature space.
// Rows smaller than min_members are dropped.  An optional eligibility mask
// restricts rows and members (combined-mode exclusion of claimed points).
inline std::vector<ClusterCandidate> extract_clusters(
    const SimilarityMatrix& s, const ClosedConfig& cfg,
    const std::vector<std::uint8_t>* eligible = nullptr) {
    std::vector<ClusterCandidate> out;
    for (std::size_t i = 0; i < s.m; ++i) {
        if (eligible && !(*eligible)[i]) continue;
        ClusterCandidate c;
        c.seed = static_cast<int>(i);
        for (std::size_t j = 0; j < s.m; ++j) {
            if (eligible && !(*eligible)[j]) continue;
            if (s.at(i, j) < cfg.s_bar) c.members.push_back(static_cast<int>(j));
        }
        if (static_cast<int>(c.members.size()) >= cfg.min_members) out.push_back(std::move(c));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Circle fitting per cluster
// ---------------------------------------------------------------------------

struct ClosedProposal {
    int seed = -1;                    // edge-point local index
    std::vector<int> members;         // edge-point local indices
    std::array<Point3, 3> anchors;    // FPS anchor points (first is the seed)
    std::array<Vec3, 3> offsets;      // refined anchor displacements
    CircleCanonical circle;           // full circle through anchors+offsets
    double fit_residual = 0;          // mean member-to-circle distance
    double confidence = 0;            // gamma
};

namespace detail {

inline double closed_fit_objective(const CircleCanonical& circle,
                                   const std::vector<Point3>& members, int samples) {
    double to_circle = 0.0;
    for (const auto& m : members) to_circle += dist_point_circle(m, circle);
    to_circle /= double(members.size());
    double to_members = 0.0;
    for (int k = 0; k < samples; ++k) {
        const Point3 p = circle.at(kTwoPi * double(k) / double(samples));
        double best = std::numeric_limits<double>::max();
        for (const auto& m : members) best = std::min(best, dist2(p, m));
        to_members += std::sqrt(best);
    }
    to_members /= double(samples);
    return to_circle + to_members;
}

}  // namespace detail

inline double closed_fit_residual(const CircleCanonical& circle,
                                  const std::vector<Point3>& members) {
    double sum = 0.0;
    for (const auto& m : members) sum += dist_point_circle(m, circle);
    return members.empty() ? 0.0 : sum / double(members.size());
}

// Fraction of 32 angular bins containing at least one member, times an
// exponential residual decay: a deterministic stand-in for the learned
// confidence head.
inline double closed_confidence(const CircleCanonical& circle,
                                const std::vector<Point3>& members, int bins = 32) {
    if (members.empty() || circle.r <= 0.0) return 0.0;
    std::vector<char> hit(bins, 0);
    for (const auto& m : members) {
        const double a = circle.angle_of(m);
        int b = static_cast<int>(a / kTwoPi * bins);
        b = std::clamp(b, 0, bins - 1);
        hit[b] = 1;
    }
    int count = 0;
    for (char h : hit) count += h;
    const double coverage = double(count) / double(bins);
    const double residual = closed_fit_residual(circle, members);
    return coverage * std::exp(-residual / (0.05 * circle.r));
}

// Fit one circle to a row proposal: anchors by FPS from the seed, offsets by
// derivative-free minimization of the Chamfer-style objective.
inline ClosedProposal fit_closed_circle(const std::vector<Point3>& edge_pos,
                                        const ClusterCandidate& cand,
                                        int objective_samples = 32,
                                        int max_fit_members = 48) {
    if (cand.members.size() < 3)
        throw TooFewMembers("fit_closed_circle: need at least three members");
    std::vector<Point3> members;
    members.reserve(cand.members.size());
    for (int i : cand.members) members.push_back(edge_pos[i]);

    int seed_local = 0;
    for (std::size_t i = 0; i < cand.members.size(); ++i)
        if (cand.members[i] == cand.seed) seed_local = static_cast<int>(i);

    const auto fps = farthest_point_sample(members, 3, seed_local);
    if (fps.size() < 3)
        throw TooFewMembers("fit_closed_circle: members collapse to fewer than three points");
    std::array<Point3, 3> anchors{members[fps[0]], members[fps[1]], members[fps[2]]};

    // cap the objective's member set for speed; FPS keeps the ring coverage
    std::vector<Point3> fit_members = members;
    if (static_cast<int>(members.size()) > max_fit_members) {
        fit_members.clear();
        for (int k : farthest_point_sample(members, max_fit_members, seed_local))
            fit_members.push_back(members[k]);
    }

    const double scale = std::max({dist(anchors[0], anchors[1]), dist(anchors[0], anchors[2]),
                                   dist(anchors[1], anchors[2])});
    auto objective = [&](const std::vector<double>& x) {
        const Point3 a = anchors[0] + Vec3{x[0], x[1], x[2]};
        const Point3 b = anchors[1] + Vec3{x[3], x[4], x[5]};
        const Point3 c = anchors[2] + Vec3{x[6], x[7], x[8]};
        try {
            const CircleCanonical circle = circle_from_three_points(a, b, c);
            return detail::closed_fit_objective(circle, fit_members, objective_samples);
        } catch (const Error&) {
            return 1e30;
        }
    };

    CircleCanonical init_check;
    try {
        init_check = circle_from_three_points(anchors[0], anchors[1], anchors[2]);
    } catch (const CollinearPoints&) {
        throw CollinearCluster("fit_closed_circle: anchors are collinear");
    } catch (const DuplicatePoints&) {
        throw CollinearCluster("fit_closed_circle: anchors coincide");
    }

    NelderMeadOptions opt;
    opt.max_evals = 320;
    const auto coarse = nelder_mead(objective, std::vector<double>(9, 0.0), 0.02 * scale, opt);

    // polish on the member distances alone; the coverage leg above biases the
    // optimum toward member clumps when the angular density is uneven
    auto member_leg = [&](const std::vector<double>& x) {
        const Point3 a = anchors[0] + Vec3{x[0], x[1], x[2]};
        const Point3 b = anchors[1] + Vec3{x[3], x[4], x[5]};
        const Point3 c = anchors[2] + Vec3{x[6], x[7], x[8]};
        try {
            const CircleCanonical circle = circle_from_three_points(a, b, c);
            double sum = 0.0;
            for (const auto& m : fit_members) sum += dist_point_circle(m, circle);
            return sum / double(fit_members.size());
        } catch (const Error&) {
            return 1e30;
        }
    };
    NelderMeadOptions polish_opt;
    polish_opt.max_evals = 260;
    const auto res = nelder_mead(member_leg, coarse.x, 0.004 * scale, polish_opt);

    ClosedProposal out;
    out.seed = cand.seed;
    out.members = cand.members;
    out.anchors = anchors;
    out.offsets = {Vec3{res.x[0], res.x[1], res.x[2]}, Vec3{res.x[3], res.x[4], res.x[5]},
                   Vec3{res.x[6], res.x[7], res.x[8]}};
    out.circle = circle_from_three_points(anchors[0] + out.offsets[0],
                                          anchors[1] + out.offsets[1],
                                          anchors[2] + out.offsets[2]);
    out.fit_residual = closed_fit_residual(out.circle, members);
    out.confidence = closed_confidence(out.circle, members);
    return out;
}

// ---------------------------------------------------------------------------
// Training-style supervision
// ---------------------------------------------------------------------------

inline double index_iou(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::vector<int> sa = a, sb = b;
    std::sort(sa.begin(), sa.end());
    std::sort(sb.begin(), sb.end());
    std::size_t inter = 0, ia = 0, ib = 0;
    while (ia < sa.size() && ib < sb.size()) {
        if (sa[ia] == sb[ib]) {
            ++inter;
            ++ia;
            ++ib;
        } else if (sa[ia] < sb[ib]) {
            ++ia;
        } else {
            ++ib;
        }
    }
    const std::size_t uni = sa.size() + sb.size() - inter;
    return uni ? double(inter) / double(uni) : 0.0;
}

// gamma_hat = 1 iff the proposal's members overlap its seed's ground-truth
// segment with IoU > 0.5.
inline double confidence_label(const ClosedProposal& p, const std::vector<int>& curve_id) {
    const int seed_curve = curve_id[p.seed];
    if (seed_curve < 0) return 0.0;
    std::vector<int> gt_segment;
    for (std::size_t i = 0; i < curve_id.size(); ++i)
        if (curve_id[i] == seed_curve) gt_segment.push_back(static_cast<int>(i));
    return index_iou(p.members, gt_segment) > 0.5 ? 1.0 : 0.0;
}

struct ClosedGt {
    std::vector<int> curve_id;                  // per edge point, -1 = none
    std::vector<ParametricCurve> curves;        // indexed by curve id
    std::vector<std::uint8_t> curve_is_circle;  // T_circle one-hot per curve id
};

// L_sim + L_score + L_para over a proposal batch (sums, not means).
inline double closed_loss(const SimilarityMatrix& s, const std::vector<ClosedProposal>& props,
                          const ClosedGt& gt, double k_margin, int samples = 64) {
    double loss = similarity_loss(s, gt.curve_id, k_margin);
    for (const auto& p : props) {
        const double gamma_hat = confidence_label(p, gt.curve_id);
        loss += (p.confidence - gamma_hat) * (p.confidence - gamma_hat);
        const int cid = gt.curve_id[p.seed];
        if (cid >= 0 && gt.curve_is_circle[cid]) {
            loss += chamfer_distance(sample_circle(p.circle, samples),
                                     sample_curve(gt.curves[cid], samples));
        }
    }
    return loss;
}

// ---------------------------------------------------------------------------
// Feature builders
// ---------------------------------------------------------------------------

// One-hot curve ids scaled by the margin; unlabeled points are pushed onto a
// spaced axis of their own so they never cluster.
inline FeatureEmbedding oracle_features(const std::vector<int>& curve_id, double k_margin) {
    int max_id = -1;
    for (int id : curve_id) max_id = std::max(max_id, id);
    FeatureEmbedding f;
    f.dim = static_cast<std::size_t>(max_id + 2);
    f.data.assign(curve_id.size() * f.dim, 0.0);
    for (std::size_t i = 0; i < curve_id.size(); ++i) {
        double* row = f.data.data() + i * f.dim;
        if (curve_id[i] >= 0)
            row[curve_id[i]] = k_margin;
        else
            row[f.dim - 1] = 2.0 * k_margin * double(i + 1);
    }
    return f;
}

// Geometric stand-in for the learned embedding: local circle-of-curvature
// estimates over k nearest edge neighbors.  Same-circle points agree on
// (center, axis, radius), so their feature rows cluster.
inline FeatureEmbedding geometric_features(const std::vector<Point3>& edge_pos,
                                           const ClosedConfig& cfg, double bbox_diag) {
    const std::size_t n = edge_pos.size();
    FeatureEmbedding f;
    f.dim = 8;
    f.data.assign(n * f.dim, 0.0);
    if (n == 0) return f;
    const KdTree3 tree(edge_pos);
    const double pos_scale = cfg.k_margin / (0.1 * bbox_diag);
    const double dir_scale = 0.25 * cfg.k_margin;
    const double rad_scale = cfg.k_margin / (0.2 * bbox_diag);
    const int k = std::min<int>(cfg.feature_knn, static_cast<int>(n) - 1);

    std::vector<Point3> nb;
    for (std::size_t i = 0; i < n; ++i) {
        const auto nn = tree.knn(edge_pos[i], k + 1);
        nb.clear();
        for (const auto& [d2, j] : nn) nb.push_back(edge_pos[j]);
        double* row = f.data.data() + i * f.dim;

        // plane of the neighborhood
        const auto eig = eigen_symmetric3(covariance3(nb));
        Vec3 axis = eig.vectors[2];
        // deterministic sign: largest-magnitude component positive
        const double ax = std::abs(axis.x), ay = std::abs(axis.y), az = std::abs(axis.z);
        const double lead = ax >= ay && ax >= az ? axis.x : (ay >= az ? axis.y : axis.z);
        if (lead < 0.0) axis = -axis;

        Vec3 mean{};
        for (const auto& p : nb) mean += p;
        mean = mean / double(nb.size());
        const Vec3 e1 = any_orthogonal(axis);
        const Vec3 e2 = axis.cross(e1).normalized();

        // algebraic in-plane circle fit (Kasa)
        double sxx = 0, sxy = 0, syy = 0, sx = 0, sy = 0, sxz = 0, syz = 0, sz = 0;
        for (const auto& p : nb) {
            const Vec3 d = p - mean;
            const double x = d.dot(e1), y = d.dot(e2);
            const double z = x * x + y * y;
            sxx += x * x; sxy += x * y; syy += y * y;
            sx += x; sy += y;
            sxz += x * z; syz += y * z; sz += z;
        }
        const double m = double(nb.size());
        const double a11 = 2 * sxx, a12 = 2 * sxy, a22 = 2 * syy;
        const double b1 = sxz, b2 = syz;
        const double det = a11 * a22 - a12 * a12;
        Point3 center = mean;
        double radius = bbox_diag;  // straight neighborhoods plateau at the clamp
        if (std::abs(det) > 1e-18 * std::max(1.0, a11 * a22)) {
            const double cx = (b1 * a22 - b2 * a12) / det;
            const double cy = (b2 * a11 - b1 * a12) / det;
            const double r2 = cx * cx + cy * cy + (sz - 2 * (cx * sx + cy * sy)) / m;
            center = mean + e1 * cx + e2 * cy;
            radius = std::sqrt(std::max(r2, 0.0));
            radius = std::min(radius, bbox_diag);
        }
        row[0] = pos_scale * center.x;
        row[1] = pos_scale * center.y;
        row[2] = pos_scale * center.z;
        row[3] = dir_scale * axis.x;
        row[4] = dir_scale * axis.y;
        row[5] = dir_scale * axis.z;
        row[6] = rad_scale * radius;
        row[7] = 0.0;
    }
    return f;
}

}  // namespace featcurve

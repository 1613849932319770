#pragma once

#include <functional>
#include <vector>

#include "featcurve/closed_proposals.hpp"
#include "featcurve/open_proposals.hpp"

namespace featcurve {

struct SelectionConfig {
    double tau_o = 0.8;    // open overlap threshold
    double tau_gamma = 0.6;  // closed confidence floor
    double tau_iou = 0.6;  // closed clustering threshold
};

// max{|A&B|/|A|, |A&B|/|B|}
inline double overlap(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.empty() || b.empty()) throw EmptySet("overlap: empty index set");
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
    return std::max(double(inter) / double(sa.size()), double(inter) / double(sb.size()));
}

inline double iou(const std::vector<int>& a, const std::vector<int>& b) {
    if (a.empty() && b.empty()) throw EmptySet("iou: both index sets empty");
    return index_iou(a, b);
}

// Greedy pass in descending member-cardinality order (ties: smaller residual,
// then pair index); a proposal survives iff it overlaps every kept one by at
// most tau_o.
inline std::vector<OpenProposal> select_open(const std::vector<OpenProposal>& proposals,
                                             const SelectionConfig& cfg = {}) {
    std::vector<std::size_t> order(proposals.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const auto& pa = proposals[a];
        const auto& pb = proposals[b];
        if (pa.members.size() != pb.members.size())
            return pa.members.size() > pb.members.size();
        if (pa.fit_residual != pb.fit_residual) return pa.fit_residual < pb.fit_residual;
        if (pa.pair.i != pb.pair.i) return pa.pair.i < pb.pair.i;
        return pa.pair.j < pb.pair.j;
    });

    std::vector<OpenProposal> kept;
    for (std::size_t k : order) {
        const auto& cand = proposals[k];
        if (cand.members.empty()) continue;
        bool ok = true;
        for (const auto& prev : kept) {
            if (overlap(cand.members, prev.members) > cfg.tau_o) {
                ok = false;
                break;
            }
        }
        if (ok) kept.push_back(cand);
    }
    return kept;
}

// Confidence floor, then single-linkage clusters over IoU > tau_iou, keeping
// the max-confidence proposal per cluster (ties: more members, lower seed).
// The kept segment's curve is re-selected as the cluster circle closest to it
// in Chamfer distance.
inline std::vector<ClosedProposal> select_closed(const std::vector<ClosedProposal>& proposals,
                                                 const std::vector<Point3>& edge_pos,
                                                 const SelectionConfig& cfg = {},
                                                 int match_samples = 32) {
    std::vector<std::size_t> alive;
    for (std::size_t i = 0; i < proposals.size(); ++i)
        if (proposals[i].confidence >= cfg.tau_gamma) alive.push_back(i);
    if (alive.empty()) return {};

    // single-linkage components of the IoU > tau_iou graph (union-find)
    std::vector<int> parent(alive.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (std::size_t a = 0; a + 1 < alive.size(); ++a) {
        for (std::size_t b = a + 1; b < alive.size(); ++b) {
            if (iou(proposals[alive[a]].members, proposals[alive[b]].members) > cfg.tau_iou) {
                const int ra = find(static_cast<int>(a)), rb = find(static_cast<int>(b));
                if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
            }
        }
    }

    std::vector<std::vector<std::size_t>> clusters(alive.size());
    for (std::size_t a = 0; a < alive.size(); ++a)
        clusters[find(static_cast<int>(a))].push_back(alive[a]);

    std::vector<ClosedProposal> kept;
    for (const auto& cluster : clusters) {
        if (cluster.empty()) continue;
        std::size_t best = cluster[0];
        for (std::size_t i : cluster) {
            const auto& p = proposals[i];
            const auto& q = proposals[best];
            if (p.confidence > q.confidence ||
                (p.confidence == q.confidence &&
                 (p.members.size() > q.members.size() ||
                  (p.members.size() == q.members.size() && p.seed < q.seed))))
                best = i;
        }
        ClosedProposal winner = proposals[best];

        // best-matching circle among the cluster for the retained segment
        std::vector<Point3> segment;
        segment.reserve(winner.members.size());
        for (int i : winner.members) segment.push_back(edge_pos[i]);
        double best_cd = std::numeric_limits<double>::max();
        for (std::size_t i : cluster) {
            const double cd =
                chamfer_distance(sample_circle(proposals[i].circle, match_samples), segment);
            if (cd < best_cd) {
                best_cd = cd;
                winner.circle = proposals[i].circle;
            }
        }
        winner.fit_residual = closed_fit_residual(winner.circle, segment);
        kept.push_back(std::move(winner));
    }
    std::sort(kept.begin(), kept.end(),
              [](const ClosedProposal& a, const ClosedProposal& b) { return a.seed < b.seed; });
    return kept;
}

// Final disjoint curve set; invariants are exactly the pairwise bounds the
// selection passes enforce.
struct CurveSet {
    std::vector<OpenProposal> open;
    std::vector<ClosedProposal> closed;

    std::vector<ParametricCurve> curves() const {
        std::vector<ParametricCurve> out;
        out.reserve(open.size() + closed.size());
        for (const auto& p : open) out.push_back(p.curve);
        for (const auto& p : closed) out.push_back(make_circle(p.circle));
        return out;
    }
};

}  // namespace featcurve

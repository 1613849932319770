#pragma once

#include <optional>
#include <unordered_map>
#include <vector>

#include "featcurve/closed_proposals.hpp"
#include "featcurve/detection.hpp"
#include "featcurve/metrics.hpp"
#include "featcurve/open_proposals.hpp"
#include "featcurve/selection.hpp"

namespace featcurve {

enum class ScorerKind { Oracle, Covariance, Sidecar };
enum class PipelineMode { OpenOnly, ClosedOnly, Combined };

inline const char* to_string(ScorerKind s) {
    switch (s) {
        case ScorerKind::Oracle: return "oracle";
        case ScorerKind::Covariance: return "covariance";
        default: return "sidecar";
    }
}
inline const char* to_string(PipelineMode m) {
    switch (m) {
        case PipelineMode::OpenOnly: return "open_only";
        case PipelineMode::ClosedOnly: return "closed_only";
        default: return "combined";
    }
}

struct PipelineConfig {
    DetectionConfig detection;
    ProposalConfig proposals;
    ClosedConfig closed;
    SelectionConfig selection;
    ScorerKind scorer = ScorerKind::Oracle;
    PipelineMode mode = PipelineMode::Combined;
    std::uint64_t seed = 0;
    int workers = 1;

    void validate() const {
        auto in_unit = [](double v) { return v > 0.0 && v < 1.0; };
        if (!in_unit(detection.tau_e) || !in_unit(detection.tau_c))
            throw InvalidConfig("detection thresholds must lie in (0,1)");
        if (detection.delta_factor <= 0.0)
            throw InvalidConfig("detection.delta_factor must be positive");
        if (proposals.radius_scale < 1.0)
            throw InvalidConfig("proposals.radius_scale must be >= 1");
        if (proposals.sample_k < 8) throw InvalidConfig("proposals.sample_k must be >= 8");
        if (proposals.em_iters < 1) throw InvalidConfig("proposals.em_iters must be >= 1");
        if (proposals.segment_tol <= 0.0)
            throw InvalidConfig("proposals.segment_tol must be positive");
        if (closed.s_bar <= 0.0) throw InvalidConfig("closed.s_bar must be positive");
        if (closed.min_members < 3) throw InvalidConfig("closed.min_members must be >= 3");
        if (!in_unit(selection.tau_o) || !in_unit(selection.tau_gamma) ||
            !in_unit(selection.tau_iou))
            throw InvalidConfig("selection thresholds must lie in (0,1)");
        if (workers < 1) throw InvalidConfig("workers must be >= 1");
    }
};

struct PipelineArtifacts {
    PointScores scores;
    DetectedPoints detected;
    std::vector<Corner> corners;
    std::vector<OpenProposal> open_raw;     // pre-selection, member ids = cloud indices
    std::vector<ClosedProposal> closed_raw; // pre-selection, member ids = edge-local
};

struct PipelineResult {
    CurveSet curves;  // all member index sets refer to cloud point indices
    std::optional<EvalReport> report;
    PipelineArtifacts artifacts;
};

// Closed-proposal stage over detected edge points: features, similarity,
// row clusters, one circle fit per unique member set.  Member ids in the
// result are edge-local; callers remap to cloud indices as needed.
inline std::vector<ClosedProposal> propose_closed(const std::vector<Point3>& edge_pos,
                                                  const std::vector<int>& edge_cloud_idx,
                                                  const GroundTruthLabels* gt,
                                                  const PipelineConfig& cfg,
                                                  const std::vector<std::uint8_t>* eligible,
                                                  double bbox_diag,
                                                  SimilarityMatrix* similarity_dump = nullptr) {
    std::vector<ClosedProposal> out;
    if (edge_pos.size() < static_cast<std::size_t>(cfg.closed.min_members)) return out;

    FeatureEmbedding features;
    if (cfg.closed.oracle_features) {
        if (!gt) throw Error("pipeline: oracle features require ground truth");
        std::vector<int> ids(edge_pos.size());
        for (std::size_t k = 0; k < edge_pos.size(); ++k)
            ids[k] = gt->curve_id[edge_cloud_idx[k]];
        features = oracle_features(ids, cfg.closed.k_margin);
    } else {
        features = geometric_features(edge_pos, cfg.closed, bbox_diag);
    }
    if (similarity_dump) *similarity_dump = build_similarity(features);

    // Row proposals are streamed straight from the features (the full matrix
    // costs O(M^2) memory; a dense wireframe scene makes that half a GB) and
    // rows with identical member sets fit the same cluster once, keeping the
    // lowest seed.  Identical to extract_clusters over build_similarity.
    const std::size_t m = features.count();
    std::vector<ClusterCandidate> clusters;
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> seen;
    for (std::size_t i = 0; i < m; ++i) {
        if (eligible && !(*eligible)[i]) continue;
        ClusterCandidate cand;
        cand.seed = static_cast<int>(i);
        for (std::size_t j = 0; j < m; ++j) {
            if (eligible && !(*eligible)[j]) continue;
            if (features.distance(i, j) < cfg.closed.s_bar)
                cand.members.push_back(static_cast<int>(j));
        }
        if (static_cast<int>(cand.members.size()) < cfg.closed.min_members) continue;
        std::uint64_t h = 1469598103934665603ull;
        for (int v : cand.members) {
            h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ull;
            h *= 1099511628211ull;
        }
        bool duplicate = false;
        for (std::size_t k : seen[h])
            duplicate = duplicate || clusters[k].members == cand.members;
        if (duplicate) continue;
        seen[h].push_back(clusters.size());
        clusters.push_back(std::move(cand));
    }

    for (const auto& cand : clusters) {
        try {
            out.push_back(fit_closed_circle(edge_pos, cand));
        } catch (const Error&) {
            // degenerate cluster: not a circle proposal
        }
    }
    return out;
}

// score -> threshold -> NMS -> open proposals -> closed proposals over
// unclaimed edge points -> selection -> metrics.  A scene without usable
// corners degrades to the closed-only path.
inline PipelineResult run_pipeline(const PointCloud& cloud, const GroundTruthLabels* gt,
                                   const std::vector<ParametricCurve>* gt_curves,
                                   const PipelineConfig& cfg,
                                   const PointScores* external_scores = nullptr) {
    cfg.validate();
    PipelineResult result;
    auto& art = result.artifacts;

    switch (cfg.scorer) {
        case ScorerKind::Oracle:
            if (!gt) throw Error("pipeline: oracle scorer requires ground truth");
            art.scores = oracle_scorer(*gt);
            break;
        case ScorerKind::Covariance:
            art.scores = covariance_scorer(cloud, cfg.detection.covariance_k);
            break;
        case ScorerKind::Sidecar:
            if (!external_scores) throw Error("pipeline: sidecar scorer requires a score file");
            art.scores = *external_scores;
            break;
    }
    art.scores.validate();
    if (art.scores.size() != cloud.size())
        throw LengthMismatch("pipeline: score count != cloud size");

    art.detected = threshold_points(cloud, art.scores, cfg.detection);
    art.corners = corner_nms(art.detected, cfg.detection.delta_factor * cloud.bbox_diagonal());

    // open stage
    if (cfg.mode != PipelineMode::ClosedOnly && art.corners.size() >= 2) {
        art.open_raw = propose_open(art.detected.edge_pos, art.detected.edge_idx, art.corners,
                                    cfg.proposals, cfg.seed, cfg.workers);
        result.curves.open = select_open(art.open_raw, cfg.selection);
    }

    // closed stage on edge points not claimed by surviving open proposals
    if (cfg.mode != PipelineMode::OpenOnly) {
        std::vector<std::uint8_t> eligible(art.detected.edge_idx.size(), 1);
        const std::vector<std::uint8_t>* mask = nullptr;
        if (cfg.mode == PipelineMode::Combined && !result.curves.open.empty()) {
            std::vector<char> claimed(cloud.size(), 0);
            for (const auto& p : result.curves.open)
                for (int ci : p.members) claimed[ci] = 1;
            for (std::size_t k = 0; k < art.detected.edge_idx.size(); ++k)
                eligible[k] = claimed[art.detected.edge_idx[k]] ? 0 : 1;
            mask = &eligible;
        }
        art.closed_raw = propose_closed(art.detected.edge_pos, art.detected.edge_idx, gt,
                                        cfg, mask, cloud.bbox_diagonal());
        result.curves.closed =
            select_closed(art.closed_raw, art.detected.edge_pos, cfg.selection);
        // remap closed member/seed ids from edge-local to cloud indices
        for (auto& p : result.curves.closed) {
            for (auto& m : p.members) m = art.detected.edge_idx[m];
            p.seed = art.detected.edge_idx[p.seed];
        }
    }

    if (gt && gt_curves) {
        EvalReport r = edge_classification_metrics(art.detected.edge_idx, gt->edge_indices());
        const auto predicted = result.curves.curves();
        if (predicted.empty() || gt_curves->empty()) {
            r.ecd = gt_curves->empty() && predicted.empty()
                        ? 0.0
                        : std::numeric_limits<double>::infinity();
        } else {
            r.ecd = edge_chamfer_distance(predicted, *gt_curves);
        }
        result.report = r;
    }
    return result;
}

}  // namespace featcurve

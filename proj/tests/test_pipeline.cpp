#include <catch2/catch.hpp>

#include "featcurve/pipeline.hpp"
#include "featcurve/synthdata.hpp"

using namespace featcurve;

namespace {

PipelineConfig oracle_cfg() {
    PipelineConfig cfg;
    cfg.scorer = ScorerKind::Oracle;
    cfg.closed.oracle_features = true;
    return cfg;
}

SyntheticScene box_scene(std::uint64_t seed = 101) {
    SceneSpec s;
    s.seed = seed;
    s.n_points = 8096;
    s.budget.lines = 12;
    s.kind = SolidKind::BoxUnion;
    return generate(s);
}

SyntheticScene cylinder_scene(std::uint64_t seed = 102) {
    SceneSpec s;
    s.seed = seed;
    s.n_points = 8096;
    s.budget.circles = 2;
    s.kind = SolidKind::CylinderUnion;
    return generate(s);
}

SyntheticScene wireframe_scene(std::uint64_t seed = 103) {
    SceneSpec s;
    s.seed = seed;
    s.n_points = 4096;
    s.budget = {1, 1, 1, 1};
    s.kind = SolidKind::WireframeOnly;
    return generate(s);
}

// normalized chamfer match between a predicted and a ground-truth curve
double match_cd(const ParametricCurve& pred, const ParametricCurve& gt, double diag) {
    return chamfer_distance(sample_curve(pred, 128), sample_curve(gt, 128)) / diag;
}

int recovered_count(const PipelineResult& res, const SyntheticScene& scene) {
    const double diag = scene.cloud.bbox_diagonal();
    int hits = 0;
    const auto predicted = res.curves.curves();
    for (const auto& gt : scene.curves) {
        double best = std::numeric_limits<double>::max();
        for (const auto& p : predicted) best = std::min(best, match_cd(p, gt, diag));
        if (best < 0.01) ++hits;
    }
    return hits;
}

}  // namespace

TEST_CASE("oracle pipeline on a box recovers the twelve edges") {
    const auto scene = box_scene();
    const auto res = run_pipeline(scene.cloud, &scene.gt, &scene.curves, oracle_cfg());

    CHECK(res.artifacts.corners.size() == 8);
    REQUIRE(res.curves.open.size() == 12);
    CHECK(res.curves.closed.empty());
    for (const auto& p : res.curves.open) CHECK(p.type == CurveKind::Line);
    CHECK(recovered_count(res, scene) == 12);
    REQUIRE(res.report);
    CHECK(res.report->ecd < 1e-3);
    CHECK(res.report->iou == 1.0);  // oracle scorer reproduces the labels
}

TEST_CASE("oracle pipeline on a cylinder recovers both rims") {
    const auto scene = cylinder_scene();
    const auto res = run_pipeline(scene.cloud, &scene.gt, &scene.curves, oracle_cfg());

    CHECK(res.artifacts.corners.empty());  // graceful closed-only degradation
    CHECK(res.curves.open.empty());
    REQUIRE(res.curves.closed.size() == 2);
    for (const auto& p : res.curves.closed) {
        double best = std::numeric_limits<double>::max();
        for (const auto& gt : scene.curves)
            best = std::min(best, std::abs(p.circle.r - gt.circle().r) / gt.circle().r);
        CHECK(best < 1e-3);
    }
    CHECK(recovered_count(res, scene) == 2);
    REQUIRE(res.report);
    CHECK(res.report->ecd < 1e-3);
}

TEST_CASE("oracle pipeline on a mixed wireframe recovers all four constructs") {
    const auto scene = wireframe_scene();
    const auto res = run_pipeline(scene.cloud, &scene.gt, &scene.curves, oracle_cfg());

    REQUIRE(res.curves.open.size() == 3);
    REQUIRE(res.curves.closed.size() == 1);
    CHECK(recovered_count(res, scene) == 4);

    int lines = 0, arcs = 0, splines = 0;
    for (const auto& p : res.curves.open) {
        switch (p.type) {
            case CurveKind::Line: ++lines; break;
            case CurveKind::Circle: ++arcs; break;
            default: ++splines; break;
        }
    }
    CHECK(lines == 1);
    CHECK(arcs == 1);
    CHECK(splines == 1);
    REQUIRE(res.report);
    CHECK(res.report->ecd < 1e-3);
}

TEST_CASE("pipeline output respects the selection bounds") {
    const auto scene = wireframe_scene(104);
    const auto res = run_pipeline(scene.cloud, &scene.gt, &scene.curves, oracle_cfg());
    const auto& cs = res.curves;
    SelectionConfig sel;
    for (std::size_t i = 0; i + 1 < cs.open.size(); ++i)
        for (std::size_t j = i + 1; j < cs.open.size(); ++j)
            CHECK(overlap(cs.open[i].members, cs.open[j].members) <= sel.tau_o);
    for (std::size_t i = 0; i + 1 < cs.closed.size(); ++i)
        for (std::size_t j = i + 1; j < cs.closed.size(); ++j)
            CHECK(iou(cs.closed[i].members, cs.closed[j].members) <= sel.tau_iou);
    for (const auto& p : cs.closed) CHECK(p.confidence >= sel.tau_gamma);
}

TEST_CASE("pipeline is deterministic") {
    const auto scene = wireframe_scene(105);
    const auto a = run_pipeline(scene.cloud, &scene.gt, &scene.curves, oracle_cfg());
    const auto b = run_pipeline(scene.cloud, &scene.gt, &scene.curves, oracle_cfg());
    REQUIRE(a.curves.open.size() == b.curves.open.size());
    REQUIRE(a.curves.closed.size() == b.curves.closed.size());
    for (std::size_t i = 0; i < a.curves.open.size(); ++i) {
        CHECK(a.curves.open[i].members == b.curves.open[i].members);
        CHECK(a.curves.open[i].fit_residual == b.curves.open[i].fit_residual);
    }
    for (std::size_t i = 0; i < a.curves.closed.size(); ++i) {
        CHECK(a.curves.closed[i].members == b.curves.closed[i].members);
        CHECK(a.curves.closed[i].circle.r == b.curves.closed[i].circle.r);
    }
    CHECK(a.report->ecd == b.report->ecd);
}

TEST_CASE("pipeline modes restrict the stages") {
    const auto scene = wireframe_scene(108);
    auto cfg = oracle_cfg();

    cfg.mode = PipelineMode::OpenOnly;
    const auto open_only = run_pipeline(scene.cloud, &scene.gt, &scene.curves, cfg);
    CHECK(open_only.curves.closed.empty());
    CHECK(!open_only.curves.open.empty());

    cfg.mode = PipelineMode::ClosedOnly;
    const auto closed_only = run_pipeline(scene.cloud, &scene.gt, &scene.curves, cfg);
    CHECK(closed_only.curves.open.empty());
    REQUIRE(closed_only.curves.closed.size() == 1);  // the scene's one circle

    cfg.mode = PipelineMode::Combined;
    const auto combined = run_pipeline(scene.cloud, &scene.gt, &scene.curves, cfg);
    CHECK(combined.curves.open.size() == open_only.curves.open.size());
    CHECK(combined.curves.closed.size() == 1);
}

TEST_CASE("covariance scorer feeds the pipeline without ground truth") {
    const auto scene = box_scene(106);
    PipelineConfig cfg;
    cfg.scorer = ScorerKind::Covariance;
    cfg.mode = PipelineMode::OpenOnly;
    const auto res = run_pipeline(scene.cloud, nullptr, nullptr, cfg);
    CHECK(!res.report);
    // classical scores are functional: edges detected along the crease band
    const auto metrics =
        edge_classification_metrics(res.artifacts.detected.edge_idx, scene.gt.edge_indices());
    CHECK(metrics.recall > 0.5);
}

TEST_CASE("stress directions are monotone for the oracle detector") {
    // ECD under growing normal noise, seed-pinned; monotone within the
    // metric's own sampling-noise bound
    const auto scene = wireframe_scene(107);
    const auto cfg = oracle_cfg();
    double prev = -1.0, first = 0.0, last = 0.0;
    for (const double x : {0.0, 0.01, 0.02, 0.05}) {
        const auto noisy = add_noise(scene, x);
        const auto res = run_pipeline(noisy.cloud, &noisy.gt, &noisy.curves, cfg);
        REQUIRE(res.report);
        CHECK(res.report->ecd >= prev - 1e-3);
        if (x == 0.0) first = res.report->ecd;
        prev = res.report->ecd;
        last = res.report->ecd;
    }
    CHECK(last > first);  // the end-to-end degradation is unambiguous
}

#include <catch2/catch.hpp>

#include "featcurve/open_proposals.hpp"

using namespace featcurve;

namespace {

std::vector<Corner> corners_at(const std::vector<Point3>& pts) {
    std::vector<Corner> out;
    for (std::size_t i = 0; i < pts.size(); ++i)
        out.push_back({static_cast<int>(i), pts[i], 1.0});
    return out;
}

CornerPair pair_of(const Point3& a, const Point3& b) {
    CornerPair p;
    p.i = 0;
    p.j = 1;
    p.c1 = a;
    p.c2 = b;
    p.center = (a + b) * 0.5;
    p.radius = 0.5 * dist(a, b);
    return p;
}

double min_pairwise(const std::vector<Point3>& pts) {
    double best = std::numeric_limits<double>::max();
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j)
            best = std::min(best, dist(pts[i], pts[j]));
    return best;
}

}  // namespace

TEST_CASE("enumerate pairs") {
    CHECK(enumerate_pairs(corners_at({{0, 0, 0}, {1, 0, 0}})).size() == 1);
    CHECK(enumerate_pairs(corners_at({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}})).size() == 6);
    std::vector<Point3> ten;
    for (int i = 0; i < 10; ++i) ten.push_back({double(i), 0, 0});
    const auto pairs = enumerate_pairs(corners_at(ten));
    CHECK(pairs.size() == 45);
    // lexicographic order by indices
    CHECK(pairs[0].i == 0);
    CHECK(pairs[0].j == 1);
    CHECK(pairs[1].j == 2);
    CHECK(pairs.back().i == 8);
    CHECK(pairs.back().j == 9);
    CHECK_THROWS_AS(enumerate_pairs(corners_at({{0, 0, 0}})), TooFewCorners);
}

TEST_CASE("sphere subsample") {
    const auto pair = pair_of({-1, 0, 0}, {1, 0, 0});  // center origin, radius 1
    ProposalConfig cfg;

    SECTION("points outside the sphere are excluded") {
        std::vector<Point3> edge{{5, 0, 0}, {0, 4, 0}, {0, 0, 3}};
        CHECK(sphere_subsample(edge, pair, cfg).empty());
    }

    SECTION("small candidate sets pass through whole") {
        Rng rng(40);
        std::vector<Point3> edge;
        for (int i = 0; i < 40; ++i) edge.push_back(rng.unit_vector() * rng.uniform(0, 0.99));
        CHECK(sphere_subsample(edge, pair, cfg).size() == 40);
    }

    SECTION("FPS beats uniform-random spread on oversized candidate sets") {
        Rng rng(41);
        std::vector<Point3> edge;
        for (int i = 0; i < 200; ++i) edge.push_back(rng.unit_vector() * rng.uniform(0, 0.99));
        const auto keep = sphere_subsample(edge, pair, cfg);
        REQUIRE(keep.size() == 64);
        std::vector<Point3> fps_pts;
        for (int i : keep) fps_pts.push_back(edge[i]);
        const double fps_spread = min_pairwise(fps_pts);

        int fps_wins = 0;
        Rng trial_rng(4242);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<int> pool(edge.size());
            std::iota(pool.begin(), pool.end(), 0);
            for (int k = 0; k < 64; ++k)
                std::swap(pool[k], pool[k + trial_rng.below(pool.size() - k)]);
            std::vector<Point3> sub;
            for (int k = 0; k < 64; ++k) sub.push_back(edge[pool[k]]);
            if (fps_spread >= min_pairwise(sub)) ++fps_wins;
        }
        CHECK(fps_wins >= 95);
    }
}

TEST_CASE("sphere subsample: seeded uniform-random mode") {
    const auto pair = pair_of({-1, 0, 0}, {1, 0, 0});
    ProposalConfig cfg;
    cfg.fps_subsample = false;
    Rng rng(45);
    std::vector<Point3> edge;
    for (int i = 0; i < 200; ++i) edge.push_back(rng.unit_vector() * rng.uniform(0, 0.99));
    const auto a = sphere_subsample(edge, pair, cfg, 5);
    const auto b = sphere_subsample(edge, pair, cfg, 5);
    REQUIRE(a.size() == 64);
    CHECK(a == b);  // same seed, same subset
    CHECK(std::is_sorted(a.begin(), a.end()));
    const auto c = sphere_subsample(edge, pair, cfg, 6);
    CHECK(a != c);  // different seed, different subset
}

TEST_CASE("fit open curve: noiseless segment selects a line") {
    const Point3 c1{0, 0, 0}, c2{2, 0, 0};
    const auto pair = pair_of(c1, c2);
    std::vector<Point3> cand;
    std::vector<int> ids;
    for (int i = 0; i < 32; ++i) {
        cand.push_back(c1 + (c2 - c1) * ((i + 0.5) / 32.0));
        ids.push_back(i);
    }
    const auto p = fit_open_curve(pair, cand, ids);
    CHECK(p.type == CurveKind::Line);
    CHECK(p.fit_residual < 1e-9);
    CHECK(p.members.size() == 32);
    CHECK(p.coverage > 0.9);
    const auto ends = curve_endpoints(p.curve);
    REQUIRE(ends);
    CHECK(dist(ends->first, c1) <= 1e-6 * pair.radius);
    CHECK(dist(ends->second, c2) <= 1e-6 * pair.radius);
}

TEST_CASE("fit open curve: quarter arc recovers the circle") {
    CircleCanonical truth;
    truth.n = Vec3{0.2, -0.3, 0.93}.normalized();
    truth.c = {0.5, -0.25, 1.0};
    truth.r = 1.3;
    truth.u = any_orthogonal(truth.n);
    truth.v = truth.u.cross(truth.n);
    truth.arc_lo = 0.0;
    truth.arc_hi = M_PI / 2;

    const Point3 c1 = truth.at(0.0), c2 = truth.at(M_PI / 2);
    const auto pair = pair_of(c1, c2);
    std::vector<Point3> cand;
    std::vector<int> ids;
    for (int i = 0; i < 32; ++i) {
        cand.push_back(truth.at(M_PI / 2 * (i + 0.5) / 32.0));
        ids.push_back(i);
    }
    const auto p = fit_open_curve(pair, cand, ids);
    REQUIRE(p.type == CurveKind::Circle);
    const auto& fit = p.curve.circle();
    CHECK(std::abs(fit.r - truth.r) < 1e-3 * truth.r);
    CHECK(dist(fit.c, truth.c) < 1e-3 * truth.r);
    CHECK(std::abs(fit.n.dot(truth.n)) > 1.0 - 1e-6);
    CHECK(!p.curve.closed);
    const auto ends = curve_endpoints(p.curve);
    REQUIRE(ends);
    const double pin_tol = 1e-6 * pair.radius;
    const bool fwd = dist(ends->first, c1) <= pin_tol && dist(ends->second, c2) <= pin_tol;
    const bool rev = dist(ends->first, c2) <= pin_tol && dist(ends->second, c1) <= pin_tol;
    CHECK((fwd || rev));
}

TEST_CASE("fit open curve: spline data recovers a nearby spline") {
    const CubicBSpline truth{{Point3{0, 0, 0}, Point3{0.5, 0.45, 0.1}, Point3{1.1, -0.35, 0.25},
                              Point3{1.6, 0.1, 0}}};
    const auto pair = pair_of(truth.control[0], truth.control[3]);
    std::vector<Point3> cand;
    std::vector<int> ids;
    const auto pts = sample_bspline(truth, 34);
    for (int i = 1; i + 1 < 34; ++i) {  // interior samples
        cand.push_back(pts[i]);
        ids.push_back(i);
    }
    const auto p = fit_open_curve(pair, cand, ids);
    REQUIRE(p.type == CurveKind::BSpline);
    const double len = curve_length(make_bspline(truth));
    const double cd = chamfer_distance(sample_curve(p.curve, 64),
                                       sample_bspline(truth, 64));
    CHECK(cd < 1e-2 * len);
}

TEST_CASE("fit open curve: empty candidate set rejects the pair") {
    const auto pair = pair_of({0, 0, 0}, {1, 0, 0});
    CHECK_THROWS_AS(fit_open_curve(pair, {}, {}), EmptyMembers);
}

TEST_CASE("per-type em fit dies when nothing survives segmentation") {
    const auto pair = pair_of({0, 0, 0}, {1, 0, 0});
    ProposalConfig cfg;
    cfg.segment_tol = 0.001;
    // far off the chord: the fixed line keeps nothing
    const std::vector<Point3> cand{{0.5, 0.49, 0}, {0.5, -0.49, 0}};
    CHECK(!detail::fit_with_em(CurveKind::Line, pair, cand, cfg).has_value());
    // collinear with the chord: the arc fit degenerates and yields no candidate
    const std::vector<Point3> axis_cand{{-0.3, 0, 0}, {1.3, 0, 0}};
    CHECK(!detail::fit_with_em(CurveKind::Circle, pair, axis_cand, cfg).has_value());
}

TEST_CASE("fit open curve: em residual trace never increases and members obey the tol") {
    Rng rng(55);
    CircleCanonical truth;
    truth.n = {0, 0, 1};
    truth.c = {0, 0, 0};
    truth.r = 1.0;
    truth.u = {1, 0, 0};
    truth.v = truth.u.cross(truth.n);
    const auto pair = pair_of(truth.at(0.0), truth.at(M_PI * 0.75));
    std::vector<Point3> cand;
    std::vector<int> ids;
    for (int i = 0; i < 48; ++i) {
        Point3 p = truth.at(M_PI * 0.75 * rng.uniform());
        p += rng.unit_vector() * (0.004 * rng.uniform());  // mild noise
        cand.push_back(p);
        ids.push_back(i);
    }
    for (int i = 0; i < 6; ++i) {  // sphere clutter
        cand.push_back(pair.center + rng.unit_vector() * (0.8 * pair.radius));
        ids.push_back(48 + i);
    }
    const auto p = fit_open_curve(pair, cand, ids);
    for (std::size_t k = 1; k < p.em_trace.size(); ++k)
        CHECK(p.em_trace[k] <= p.em_trace[k - 1]);
    const double tol = ProposalConfig{}.segment_tol * pair.radius;
    for (int i : p.member_local) CHECK(dist_point_curve(cand[i], p.curve) < tol);

    // identical inputs give identical outputs
    const auto q = fit_open_curve(pair, cand, ids);
    CHECK(q.fit_residual == p.fit_residual);
    CHECK(q.members == p.members);
    CHECK(q.type == p.type);
}

TEST_CASE("proposal loss") {
    const Point3 a{0, 0, 0}, b{1, 0, 0};
    std::vector<GtCurve> gt;
    gt.push_back({make_line(a, b), 0});

    // candidates on the gt line, all belonging to curve 0
    std::vector<Point3> cand;
    std::vector<int> cand_ids, gt_ids;
    for (int i = 0; i < 16; ++i) {
        cand.push_back(a + (b - a) * ((i + 0.5) / 16.0));
        cand_ids.push_back(i);
        gt_ids.push_back(0);
    }

    SECTION("perfect proposal scores zero") {
        const auto p = fit_open_curve(pair_of(a, b), cand, cand_ids);
        CHECK(proposal_loss_eval(p, cand, gt_ids, gt) < 1e-6);
    }

    SECTION("translated curve pays the chamfer term times w_p") {
        const double t = 1e-3;
        OpenProposal p;
        p.pair = pair_of({0, t, 0}, {1, t, 0});
        p.type = CurveKind::Line;
        p.curve = make_line({0, t, 0}, {1, t, 0});
        for (int i = 0; i < 16; ++i) p.member_local.push_back(i);
        const double loss = proposal_loss_eval(p, cand, gt_ids, gt, {}, 0.01);
        CHECK(loss == Approx(10.0 * 2.0 * t).epsilon(0.05));
    }

    SECTION("wrong type pays exactly w_c") {
        OpenProposal p;
        p.pair = pair_of(a, b);
        p.type = CurveKind::BSpline;
        p.curve = make_bspline(
            CubicBSpline{{a, a + (b - a) / 3.0, a + (b - a) * (2.0 / 3.0), b}});
        for (int i = 0; i < 16; ++i) p.member_local.push_back(i);
        const double loss = proposal_loss_eval(p, cand, gt_ids, gt);
        CHECK(loss == Approx(1.0).margin(1e-6));
    }

    SECTION("no endpoint-matched gt curve throws") {
        OpenProposal p;
        p.pair = pair_of({5, 5, 5}, {6, 5, 5});
        p.curve = make_line({5, 5, 5}, {6, 5, 5});
        CHECK_THROWS_AS(proposal_loss_eval(p, cand, gt_ids, gt), NoMatchingGtCurve);
    }
}

TEST_CASE("propose_open end to end on two separated segments") {
    // two parallel segments far apart; four corners, six pairs, two true curves
    const Point3 a1{0, 0, 0}, b1{1, 0, 0};
    const Point3 a2{0, 3, 0}, b2{1, 3, 0};
    std::vector<Point3> edge_pos;
    std::vector<int> edge_idx;
    int next = 0;
    for (const auto& [s, e] : {std::pair{a1, b1}, std::pair{a2, b2}}) {
        for (int i = 0; i < 24; ++i) {
            edge_pos.push_back(s + (e - s) * ((i + 0.5) / 24.0));
            edge_idx.push_back(next++);
        }
    }
    const auto corners = corners_at({a1, b1, a2, b2});
    const auto props = propose_open(edge_pos, edge_idx, corners);
    // pairs connecting different segments die on coverage; the two true ones live
    REQUIRE(props.size() == 2);
    for (const auto& p : props) {
        CHECK(p.type == CurveKind::Line);
        CHECK(p.fit_residual < 1e-9);
        CHECK(p.members.size() == 24);
    }

    // worker-parallel map returns the identical result in the same order
    const auto par = propose_open(edge_pos, edge_idx, corners, {}, 0, 2);
    REQUIRE(par.size() == props.size());
    for (std::size_t k = 0; k < par.size(); ++k) {
        CHECK(par[k].members == props[k].members);
        CHECK(par[k].fit_residual == props[k].fit_residual);
    }
}

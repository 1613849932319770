#include <catch2/catch.hpp>

#include "featcurve/detection.hpp"
#include "featcurve/geometry.hpp"

using namespace featcurve;

namespace {

// independent alpha-weighted cross-entropy (no focusing factor)
double weighted_bce(const std::vector<double>& probs, const std::vector<std::uint8_t>& labels,
                    double alpha) {
    double sum = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const bool pos = labels[i] != 0;
        const double pt = std::max(pos ? probs[i] : 1.0 - probs[i], 1e-7);
        sum += -(pos ? alpha : 1.0 - alpha) * std::log(pt);
    }
    return sum / double(probs.size());
}

GroundTruthLabels tiny_gt() {
    GroundTruthLabels gt;
    gt.edge_label = {1, 1, 0, 0, 1};
    gt.corner_label = {1, 0, 0, 0, 0};
    gt.edge_offset = {{0.1, 0, 0}, {0, 0.2, 0}, {}, {}, {0, 0, 0.3}};
    gt.corner_offset = {{0.05, 0.05, 0}, {}, {}, {}, {}};
    gt.curve_id = {0, 0, -1, -1, 1};
    return gt;
}

}  // namespace

TEST_CASE("focal loss") {
    Rng rng(31);

    SECTION("gamma=0, alpha=1 reduces to cross-entropy") {
        // mixed labels against the alpha-weighted CE oracle, all alphas
        for (int trial = 0; trial < 50; ++trial) {
            const std::size_t n = 1 + rng.below(64);
            std::vector<double> p(n);
            std::vector<std::uint8_t> y(n);
            for (auto& v : p) v = rng.uniform();
            for (auto& v : y) v = rng.uniform() < 0.5 ? 1 : 0;
            const double alpha = trial % 2 ? 1.0 : rng.uniform();
            REQUIRE(focal_loss(p, y, 0.0, alpha) ==
                    Approx(weighted_bce(p, y, alpha)).margin(1e-12));
        }
        // all-positive case: plain binary cross-entropy -mean(ln p)
        std::vector<double> p{0.3, 0.9, 0.5, 0.99};
        std::vector<std::uint8_t> y{1, 1, 1, 1};
        double ce = 0.0;
        for (double v : p) ce -= std::log(v);
        ce /= double(p.size());
        REQUIRE(focal_loss(p, y, 0.0, 1.0) == Approx(ce).margin(1e-12));
    }

    SECTION("frozen single-positive value") {
        const double expect = 0.25 * 0.25 * std::log(2.0);
        CHECK(focal_loss({0.5}, {1}, 2.0, 0.25) == Approx(expect).margin(1e-12));
        CHECK(expect == Approx(0.04332).margin(5e-6));
    }

    SECTION("perfect predictions score zero") {
        CHECK(focal_loss({1.0, 1.0, 0.0, 0.0}, {1, 1, 0, 0}, 2.0, 0.25) <= 1e-5);
    }

    SECTION("monotone non-increasing in p_t") {
        for (int trial = 0; trial < 100; ++trial) {
            double a = rng.uniform(), b = rng.uniform();
            if (a > b) std::swap(a, b);
            // positive label: p_t = T
            CHECK(focal_loss({a}, {1}, 2.0, 0.25) >= focal_loss({b}, {1}, 2.0, 0.25));
            // negative label: p_t = 1 - T, so loss rises with T
            CHECK(focal_loss({a}, {0}, 2.0, 0.25) <= focal_loss({b}, {0}, 2.0, 0.25));
        }
    }

    SECTION("length mismatch throws") {
        CHECK_THROWS_AS(focal_loss({0.5, 0.5}, {1}, 2.0, 0.25), LengthMismatch);
    }
}

TEST_CASE("smooth l1") {
    SECTION("exact branch values") {
        const std::vector<Vec3> zero{{0, 0, 0}};
        CHECK(smooth_l1({{0.5, 0, 0}}, zero, {1}) == 0.125);
        CHECK(smooth_l1({{2, 0, 0}}, zero, {1}) == 1.5);
        CHECK(smooth_l1({{1, 2, 3}}, {{1, 2, 3}}, {1}) == 0.0);
    }
    SECTION("mask selects nothing: zero") {
        CHECK(smooth_l1({{5, 5, 5}}, {{0, 0, 0}}, {0}) == 0.0);
    }
    SECTION("length mismatch throws") {
        CHECK_THROWS_AS(smooth_l1({{0, 0, 0}}, {}, {1}), LengthMismatch);
    }
}

TEST_CASE("detection loss") {
    const auto gt = tiny_gt();
    const auto perfect = oracle_scorer(gt);

    SECTION("oracle scores reach the floor") {
        CHECK(detection_loss(perfect, gt) <= 1e-5);
    }

    SECTION("zero regression weights leave only the focal terms") {
        PointScores s = perfect;
        s.edge_offset.assign(s.size(), Vec3{1, 1, 1});  // break offsets
        s.corner_offset.assign(s.size(), Vec3{1, 1, 1});
        DetectionConfig cfg;
        cfg.lambda_e = 0.0;
        cfg.lambda_c = 0.0;
        const double expect =
            focal_loss(s.edge_prob, gt.edge_label, cfg.focal_gamma, cfg.focal_alpha) +
            focal_loss(s.corner_prob, gt.corner_label, cfg.focal_gamma, cfg.focal_alpha);
        CHECK(detection_loss(s, gt, cfg) == Approx(expect).margin(1e-15));
    }

    SECTION("wrong scores sit above the floor") {
        PointScores s = perfect;
        s.edge_prob[2] = 0.9;  // false positive on a clean point
        CHECK(detection_loss(s, gt) > 1e-5);
    }

    SECTION("never negative") {
        Rng rng(8);
        for (int trial = 0; trial < 30; ++trial) {
            PointScores s;
            const std::size_t n = gt.size();
            for (std::size_t i = 0; i < n; ++i) {
                s.edge_prob.push_back(rng.uniform());
                s.corner_prob.push_back(rng.uniform());
                s.edge_offset.push_back({rng.uniform(-1, 1), 0, 0});
                s.corner_offset.push_back({0, rng.uniform(-1, 1), 0});
            }
            CHECK(detection_loss(s, gt) >= 0.0);
        }
    }
}

TEST_CASE("threshold points") {
    const auto gt = tiny_gt();
    const PointCloud cloud(std::vector<Point3>{
        {0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}, {4, 0, 0}});

    SECTION("zero probabilities produce empty sets") {
        PointScores s;
        s.edge_prob.assign(5, 0.0);
        s.corner_prob.assign(5, 0.0);
        s.edge_offset.assign(5, Vec3{});
        s.corner_offset.assign(5, Vec3{});
        const auto det = threshold_points(cloud, s);
        CHECK(det.edge_idx.empty());
        CHECK(det.corner_idx.empty());
    }

    SECTION("oracle scores reproduce the labeled sets with projected positions") {
        const auto det = threshold_points(cloud, oracle_scorer(gt));
        CHECK(det.edge_idx == gt.edge_indices());
        CHECK(det.corner_idx == gt.corner_indices());
        REQUIRE(det.edge_pos.size() == 3);
        CHECK(dist(det.edge_pos[0], cloud[0] + gt.edge_offset[0]) == 0.0);
    }

    SECTION("raising the threshold never adds points") {
        Rng rng(77);
        PointScores s;
        for (int i = 0; i < 5; ++i) {
            s.edge_prob.push_back(rng.uniform());
            s.corner_prob.push_back(rng.uniform());
            s.edge_offset.push_back({});
            s.corner_offset.push_back({});
        }
        DetectionConfig lo, hi;
        lo.tau_e = 0.6;
        hi.tau_e = 0.8;
        lo.tau_c = 0.6;
        hi.tau_c = 0.8;
        const auto dl = threshold_points(cloud, s, lo);
        const auto dh = threshold_points(cloud, s, hi);
        for (int i : dh.edge_idx)
            CHECK(std::find(dl.edge_idx.begin(), dl.edge_idx.end(), i) != dl.edge_idx.end());
        for (int i : dh.corner_idx)
            CHECK(std::find(dl.corner_idx.begin(), dl.corner_idx.end(), i) !=
                  dl.corner_idx.end());
    }
}

TEST_CASE("corner nms") {
    const double delta = 0.1;

    SECTION("far candidates both retained") {
        const auto out = corner_nms({0, 1}, {Point3{0, 0, 0}, Point3{3 * delta, 0, 0}},
                                    {0.95, 0.96}, delta);
        CHECK(out.size() == 2);
    }

    SECTION("tight cluster keeps the max-probability candidate") {
        const auto out = corner_nms(
            {0, 1, 2},
            {Point3{0, 0, 0}, Point3{delta / 2, 0, 0}, Point3{0, delta / 2, 0}},
            {0.91, 0.95, 0.93}, delta);
        REQUIRE(out.size() == 1);
        CHECK(out[0].index == 1);
        CHECK(out[0].prob == 0.95);
    }

    SECTION("jittered candidates around well-separated corners collapse exactly") {
        // five corners pairwise > 3*delta apart, four candidates each within delta/4
        std::vector<Point3> truth{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0.5, 0.5, 1}};
        std::vector<int> idx;
        std::vector<Point3> pos;
        std::vector<double> prob;
        Rng rng(12);
        for (std::size_t c = 0; c < truth.size(); ++c) {
            for (int k = 0; k < 4; ++k) {
                idx.push_back(static_cast<int>(idx.size()));
                pos.push_back(truth[c] + rng.unit_vector() * (delta / 4 * rng.uniform()));
                prob.push_back(0.9 + 0.02 * k);
            }
        }
        const auto out = corner_nms(idx, pos, prob, delta);
        REQUIRE(out.size() == truth.size());
        for (const auto& corner : out) {
            double best = std::numeric_limits<double>::max();
            for (const auto& t : truth) best = std::min(best, dist(corner.position, t));
            CHECK(best <= delta / 4 + 1e-12);
            CHECK(corner.prob == 0.96);  // highest jitter rank in every group
        }
    }

    SECTION("output is a subset of the candidates") {
        Rng rng(13);
        std::vector<int> idx;
        std::vector<Point3> pos;
        std::vector<double> prob;
        for (int i = 0; i < 40; ++i) {
            idx.push_back(i);
            pos.push_back({rng.uniform(0, 1), rng.uniform(0, 1), rng.uniform(0, 1)});
            prob.push_back(rng.uniform());
        }
        const auto out = corner_nms(idx, pos, prob, 0.2);
        for (const auto& c : out) {
            const auto it = std::find(idx.begin(), idx.end(), c.index);
            REQUIRE(it != idx.end());
            CHECK(pos[it - idx.begin()] == c.position);
        }
    }
}

TEST_CASE("covariance scorer") {
    SECTION("flat plane scores near zero") {
        std::vector<Point3> pts;
        for (int i = 0; i < 40; ++i)
            for (int j = 0; j < 40; ++j) pts.push_back({i * 0.02, j * 0.02, 0.0});
        const auto s = covariance_scorer(PointCloud(pts), 16);
        for (double t : s.edge_prob) CHECK(t <= 0.1);
    }

    SECTION("dihedral crease carries the edge response") {
        // two unit half-planes meeting at 90 degrees along the z axis
        std::vector<Point3> pts;
        const int n = 50;
        const double h = 1.0 / n;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j) {
                pts.push_back({i * h, 0.0, j * h});
                if (i > 0) pts.push_back({0.0, i * h, j * h});  // crease shared once
            }
        const PointCloud cloud(pts);
        const auto s = covariance_scorer(cloud, 16);
        // argmax response sits within two sample spacings of the crease line
        std::size_t best = 0;
        for (std::size_t i = 1; i < pts.size(); ++i)
            if (s.edge_prob[i] > s.edge_prob[best]) best = i;
        const double crease_dist = std::hypot(pts[best].x, pts[best].y);
        CHECK(crease_dist <= 2.0 * h);
        CHECK(s.edge_prob[best] > 0.7);
        // and flat interior points stay quiet
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const double d = std::hypot(pts[i].x, pts[i].y);
            if (pts[i].y == 0.0 && d > 6 * h && pts[i].z > 6 * h && pts[i].z < 1.0 - 6 * h &&
                pts[i].x < 1.0 - 6 * h)
                CHECK(s.edge_prob[i] < 0.5);
        }
    }

    SECTION("degenerate duplicated cloud scores zero") {
        std::vector<Point3> pts(18, Point3{1, 1, 1});
        const auto s = covariance_scorer(PointCloud(pts), 16);
        for (double t : s.edge_prob) CHECK(t == 0.0);
        for (double t : s.corner_prob) CHECK(t == 0.0);
    }

    SECTION("cloud smaller than the neighborhood throws") {
        std::vector<Point3> pts(10, Point3{0, 0, 0});
        CHECK_THROWS_AS(covariance_scorer(PointCloud(pts), 16), CloudTooSmall);
    }
}

TEST_CASE("oracle scorer round trip") {
    const auto gt = tiny_gt();
    const auto s = oracle_scorer(gt);
    CHECK(detection_loss(s, gt) <= 1e-5);

    GroundTruthLabels no_corners = gt;
    no_corners.corner_label.assign(gt.size(), 0);
    const PointCloud cloud(std::vector<Point3>{
        {0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}, {4, 0, 0}});
    const auto det = threshold_points(cloud, oracle_scorer(no_corners));
    CHECK(det.corner_idx.empty());
}

#include <catch2/catch.hpp>

#include "featcurve/selection.hpp"

using namespace featcurve;

namespace {

OpenProposal open_with(std::vector<int> members, double residual, int pi, int pj) {
    OpenProposal p;
    p.members = std::move(members);
    p.fit_residual = residual;
    p.pair.i = pi;
    p.pair.j = pj;
    p.pair.c1 = {double(pi), 0, 0};
    p.pair.c2 = {double(pj), 1, 0};
    p.pair.center = (p.pair.c1 + p.pair.c2) * 0.5;
    p.pair.radius = 0.5 * dist(p.pair.c1, p.pair.c2);
    p.curve = make_line(p.pair.c1, p.pair.c2);
    return p;
}

ClosedProposal closed_with(int seed, std::vector<int> members, double gamma,
                           const CircleCanonical& circle) {
    ClosedProposal p;
    p.seed = seed;
    p.members = std::move(members);
    p.confidence = gamma;
    p.circle = circle;
    return p;
}

CircleCanonical ring(const Point3& c, double r) {
    CircleCanonical out;
    out.c = c;
    out.n = {0, 0, 1};
    out.r = r;
    out.u = {1, 0, 0};
    out.v = out.u.cross(out.n);
    return out;
}

}  // namespace

TEST_CASE("overlap and iou") {
    CHECK(overlap({1, 2, 3}, {1, 2, 3}) == 1.0);
    CHECK(overlap({1, 2, 3}, {2, 3, 4, 5}) == Approx(2.0 / 3.0));
    CHECK(overlap({1, 2}, {3, 4}) == 0.0);
    CHECK_THROWS_AS(overlap({}, {1}), EmptySet);

    CHECK(iou({1, 2}, {1, 2}) == 1.0);
    CHECK(iou({1, 2}, {2, 3}) == Approx(1.0 / 3.0));
    CHECK(iou({1, 2}, {3, 4}) == 0.0);
    CHECK(iou({}, {1}) == 0.0);
    CHECK_THROWS_AS(iou({}, {}), EmptySet);
}

TEST_CASE("open selection") {
    SelectionConfig cfg;

    SECTION("duplicate member sets collapse to one") {
        std::vector<OpenProposal> props{open_with({1, 2, 3, 4}, 0.02, 0, 1),
                                        open_with({1, 2, 3, 4}, 0.01, 0, 2)};
        const auto kept = select_open(props, cfg);
        REQUIRE(kept.size() == 1);
        CHECK(kept[0].pair.j == 2);  // smaller residual wins the tie
    }

    SECTION("disjoint proposals all survive") {
        std::vector<OpenProposal> props{open_with({1, 2}, 0.1, 0, 1),
                                        open_with({3, 4}, 0.1, 0, 2),
                                        open_with({5, 6}, 0.1, 1, 2)};
        CHECK(select_open(props, cfg).size() == 3);
    }

    SECTION("near-chain with 0.9 overlaps keeps only the largest") {
        // hand-evaluated greedy: A={0..9}, B and C overlap A (and each other) at 0.9
        std::vector<int> a, b, c;
        for (int i = 0; i < 10; ++i) a.push_back(i);
        for (int i = 1; i < 10; ++i) b.push_back(i);
        b.push_back(10);
        for (int i = 1; i < 10; ++i) c.push_back(i);
        c.push_back(11);
        REQUIRE(overlap(a, b) == Approx(0.9));
        REQUIRE(overlap(a, c) == Approx(0.9));
        std::vector<OpenProposal> props{open_with(a, 0.01, 0, 1), open_with(b, 0.02, 0, 2),
                                        open_with(c, 0.03, 1, 2)};
        const auto kept = select_open(props, cfg);
        REQUIRE(kept.size() == 1);
        CHECK(kept[0].members == a);
    }

    SECTION("randomized: pairwise bound, idempotence, subset") {
        Rng rng(71);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<OpenProposal> props;
            const int np = 2 + int(rng.below(12));
            for (int k = 0; k < np; ++k) {
                std::vector<int> members;
                for (int v = 0; v < 30; ++v)
                    if (rng.uniform() < 0.3) members.push_back(v);
                if (members.empty()) members.push_back(int(rng.below(30)));
                props.push_back(open_with(members, rng.uniform(), k, k + 1));
            }
            const auto kept = select_open(props, cfg);
            for (std::size_t x = 0; x + 1 < kept.size(); ++x)
                for (std::size_t y = x + 1; y < kept.size(); ++y)
                    REQUIRE(overlap(kept[x].members, kept[y].members) <= cfg.tau_o);
            const auto again = select_open(kept, cfg);
            REQUIRE(again.size() == kept.size());
            for (std::size_t x = 0; x < kept.size(); ++x)
                REQUIRE(again[x].members == kept[x].members);
            for (const auto& k : kept) {
                bool found = false;
                for (const auto& p : props) found = found || p.members == k.members;
                REQUIRE(found);
            }
        }
    }
}

TEST_CASE("closed selection") {
    SelectionConfig cfg;
    std::vector<Point3> edge_pos;
    const auto ra = ring({0, 0, 0}, 1.0);
    const auto rb = ring({5, 0, 0}, 0.8);
    for (int i = 0; i < 40; ++i) edge_pos.push_back(ra.at(kTwoPi * i / 40.0));
    for (int i = 0; i < 40; ++i) edge_pos.push_back(rb.at(kTwoPi * i / 40.0));

    SECTION("zero confidences empty the output") {
        std::vector<ClosedProposal> props;
        std::vector<int> members;
        for (int i = 0; i < 40; ++i) members.push_back(i);
        for (int s = 0; s < 5; ++s) props.push_back(closed_with(s, members, 0.0, ra));
        CHECK(select_closed(props, edge_pos, cfg).empty());
    }

    SECTION("forty identical row proposals collapse to one") {
        std::vector<int> members;
        for (int i = 0; i < 40; ++i) members.push_back(i);
        std::vector<ClosedProposal> props;
        for (int s = 0; s < 40; ++s)
            props.push_back(closed_with(s, members, 0.8 + 0.001 * s, ra));
        const auto kept = select_closed(props, edge_pos, cfg);
        REQUIRE(kept.size() == 1);
        CHECK(kept[0].seed == 39);  // highest confidence
    }

    SECTION("two separate circles both survive with their member sets") {
        std::vector<int> ma, mb;
        for (int i = 0; i < 40; ++i) ma.push_back(i);
        for (int i = 40; i < 80; ++i) mb.push_back(i);
        std::vector<ClosedProposal> props;
        for (int s = 0; s < 40; ++s) props.push_back(closed_with(s, ma, 0.9, ra));
        for (int s = 40; s < 80; ++s) props.push_back(closed_with(s, mb, 0.85, rb));
        const auto kept = select_closed(props, edge_pos, cfg);
        REQUIRE(kept.size() == 2);
        CHECK(kept[0].members == ma);
        CHECK(kept[1].members == mb);
    }

    SECTION("the retained segment re-selects the best-matching cluster circle") {
        std::vector<int> members;
        for (int i = 0; i < 40; ++i) members.push_back(i);
        // highest-confidence row carries a bad circle; a low-confidence row has
        // the right one; the segment keeps the winner's members but the good fit
        auto bad = closed_with(0, members, 0.95, ring({0.4, 0.4, 0}, 1.4));
        auto good = closed_with(1, members, 0.7, ra);
        const auto kept = select_closed({bad, good}, edge_pos, cfg);
        REQUIRE(kept.size() == 1);
        CHECK(kept[0].seed == 0);
        CHECK(dist(kept[0].circle.c, ra.c) < 1e-12);
        CHECK(kept[0].circle.r == ra.r);
    }

    SECTION("randomized: bounds, idempotence, confidence floor") {
        Rng rng(72);
        for (int trial = 0; trial < 30; ++trial) {
            std::vector<ClosedProposal> props;
            const int np = 1 + int(rng.below(10));
            for (int k = 0; k < np; ++k) {
                std::vector<int> members;
                for (int v = 0; v < 80; ++v)
                    if (rng.uniform() < 0.2) members.push_back(v);
                if (members.size() < 3) members = {0, 1, 2};
                props.push_back(closed_with(k, members, rng.uniform(),
                                            ring({rng.uniform(-1, 1), 0, 0},
                                                 rng.uniform(0.5, 2))));
            }
            const auto kept = select_closed(props, edge_pos, cfg);
            for (const auto& p : kept) REQUIRE(p.confidence >= cfg.tau_gamma);
            for (std::size_t x = 0; x + 1 < kept.size(); ++x)
                for (std::size_t y = x + 1; y < kept.size(); ++y)
                    REQUIRE(iou(kept[x].members, kept[y].members) <= cfg.tau_iou);
            const auto again = select_closed(kept, edge_pos, cfg);
            REQUIRE(again.size() == kept.size());
            for (std::size_t x = 0; x < kept.size(); ++x) {
                REQUIRE(again[x].seed == kept[x].seed);
                REQUIRE(again[x].members == kept[x].members);
            }
            // no new curves: every output circle comes from some input proposal
            for (const auto& k : kept) {
                bool from_input = false;
                for (const auto& p : props)
                    from_input = from_input || (p.circle.c == k.circle.c &&
                                                p.circle.r == k.circle.r &&
                                                p.circle.n == k.circle.n);
                REQUIRE(from_input);
            }
        }
    }
}

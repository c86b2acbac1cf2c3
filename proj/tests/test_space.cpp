#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracle.hpp"
#include "qgb/space.hpp"

using namespace qgb;

namespace {

std::shared_ptr<const SpaceHandle> make(const std::string& spec) {
    return build_space(SpaceSpec::parse(spec));
}

void check_metric_axioms(const SpaceHandle& s, const std::vector<Point>& pts) {
    double tol = s.tolerance();
    std::size_t violations = 0;
    for (auto& a : pts) {
        if (std::abs(s.distance(a, a)) > 1e-12) ++violations;
        for (auto& b : pts) {
            double dab = s.distance(a, b);
            if (dab < -tol) ++violations;
            if (std::abs(s.distance(b, a) - dab) > 1e-12) ++violations;
            if (!(a == b) && dab <= tol) ++violations;
        }
    }
    for (auto& a : pts)
        for (auto& b : pts)
            for (auto& c : pts)
                if (s.distance(a, c) >
                    s.distance(a, b) + s.distance(b, c) + 1e-9)
                    ++violations;
    CHECK(violations == 0);
}

}  // namespace

TEST_CASE("line basics") {
    auto s = make(R"({"kind":"line"})");
    Point a{{0}}, b{{0}};
    CHECK(s->distance(a, b) == 0.0);
    auto ball = s->ball(Point{{0}}, 2);
    REQUIRE(ball.size() == 5);
    CHECK(ball.front().w[0] == -2);
    CHECK(ball.back().w[0] == 2);
    CHECK(s->norm(s->basepoint()) == 0.0);
}

TEST_CASE("grid2d basics") {
    auto s = make(R"({"kind":"grid2d"})");
    CHECK(s->distance(Point{{0, 0}}, Point{{3, 4}}) == 7.0);
    CHECK(s->ball(Point{{0, 0}}, 2).size() == 13);
    CHECK(s->norm(Point{{3, 4}}) == 7.0);
}

TEST_CASE("tree basics") {
    auto s = make(R"({"kind":"tree","degree":4})");
    Point leaf3{{1, 0, 2}};
    CHECK(s->distance(s->basepoint(), leaf3) == 3.0);
    CHECK(s->ball(s->basepoint(), 2).size() == 17);  // 1 + 4 + 12
    CHECK_THROWS_AS(make(R"({"kind":"tree","degree":2})"), SpaceError);
}

TEST_CASE("product of lines") {
    auto s = make(R"({"kind":"product","a":{"kind":"line"},"b":{"kind":"line"}})");
    Point p = s->decode(json::parse("[[0],[0]]"));
    Point q = s->decode(json::parse("[[2],[5]]"));
    CHECK(s->distance(p, q) == 7.0);
    // factor-distance sum on random pairs
    auto a = make(R"({"kind":"line"})");
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::int64_t> pick(-20, 20);
    for (int t = 0; t < 50; ++t) {
        std::int64_t x1 = pick(rng), y1 = pick(rng), x2 = pick(rng),
                     y2 = pick(rng);
        Point u = s->decode(json{json{x1}, json{y1}});
        Point v = s->decode(json{json{x2}, json{y2}});
        CHECK(s->distance(u, v) ==
              a->distance(Point{{x1}}, Point{{x2}}) +
                  a->distance(Point{{y1}}, Point{{y2}}));
    }
}

TEST_CASE("sqrt_rays metric and examples") {
    auto s = make(R"({"kind":"sqrt_rays"})");
    CHECK(s->distance(s->decode(json{9, 0}), s->decode(json{0, 9})) ==
          doctest::Approx(3.0));
    // Shortest-path completion: cross at the lower level then climb.
    CHECK(s->distance(s->decode(json{4, 0}), s->decode(json{0, 16})) ==
          doctest::Approx(2.0 + 12.0));
    CHECK(s->norm(s->decode(json{0, 25})) == doctest::Approx(25.0));

    SUBCASE("agrees with Dijkstra over the generating edges") {
        oracle::SqrtRaysGraph g(80, false);
        std::mt19937_64 rng(3);
        std::uniform_int_distribution<std::int64_t> pick(0, 80);
        for (int t = 0; t < 300; ++t) {
            std::int64_t x = pick(rng), y = pick(rng);
            Point a{{0, x}};
            Point b = y == 0 ? Point{{0, 0}} : Point{{1, y}};
            std::vector<std::int64_t> la{0, x};
            std::vector<std::int64_t> lb =
                y == 0 ? std::vector<std::int64_t>{0, 0}
                       : std::vector<std::int64_t>{1, y};
            CHECK(s->distance(a, b) == doctest::Approx(g.dist(la, lb)));
        }
    }

    SUBCASE("bridged variant agrees with Dijkstra") {
        auto sb = make(R"({"kind":"sqrt_rays","bridges":true})");
        oracle::SqrtRaysGraph g(80, true);
        for (std::int64_t x : {0, 1, 3, 9, 16, 25, 40, 60, 79}) {
            for (std::int64_t y : {1, 2, 8, 16, 30, 49, 64, 80}) {
                Point a = x == 0 ? Point{{0, 0}} : Point{{0, x}};
                Point b{{1, y}};
                std::vector<std::int64_t> la{0, x}, lb{1, y};
                CHECK(sb->distance(a, b) == doctest::Approx(g.dist(la, lb)));
            }
        }
        // bridge interior points
        Point br = sb->decode(json{"bridge", 4, 2});
        std::vector<std::int64_t> lbr{2, 4, 2};
        for (std::int64_t y : {1, 9, 16, 25}) {
            CHECK(sb->distance(br, Point{{1, y}}) ==
                  doctest::Approx(g.dist(lbr, {1, y})));
        }
        CHECK(sb->distance(br, Point{{0, 10}}) ==
              doctest::Approx(g.dist(lbr, {0, 10})));
    }
}

TEST_CASE("wedge_flats closed form matches BFS") {
    auto s = make(R"({"kind":"wedge_flats"})");
    auto pts = s->ball(s->basepoint(), 5);
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
    for (int t = 0; t < 60; ++t) {
        const Point& a = pts[pick(rng)];
        const Point& b = pts[pick(rng)];
        CHECK(s->distance(a, b) == oracle::bfs_distance(*s, a, b, 12));
    }
}

TEST_CASE("block_union closed form matches BFS") {
    auto s = make(R"({"kind":"block_union"})");
    auto pts = s->ball(s->basepoint(), 4);
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<std::size_t> pick(0, pts.size() - 1);
    for (int t = 0; t < 60; ++t) {
        const Point& a = pts[pick(rng)];
        const Point& b = pts[pick(rng)];
        CHECK(s->distance(a, b) == oracle::bfs_distance(*s, a, b, 10));
    }
}

TEST_CASE("explicit graph") {
    auto s = make(R"({"kind":"explicit_graph",
        "vertices":["a","b","c"],
        "edges":[["a","b",1],["b","c",2]],
        "basepoint":"a"})");
    CHECK(s->distance(s->decode(json("a")), s->decode(json("c"))) == 3.0);
    CHECK_THROWS_AS(make(R"({"kind":"explicit_graph",
        "vertices":["a","b"],"edges":[]})"),
                    SpaceError);
}

TEST_CASE("metric axioms hold on every builder") {
    struct Case {
        const char* spec;
        double radius;
    };
    for (auto& c : std::initializer_list<Case>{
             {R"({"kind":"line"})", 30},
             {R"({"kind":"grid2d"})", 6},
             {R"({"kind":"tree","degree":4})", 4},
             {R"({"kind":"product","a":{"kind":"line"},"b":{"kind":"line"}})",
              5},
             {R"({"kind":"wedge_flats"})", 5},
             {R"({"kind":"block_union"})", 3},
         }) {
        auto s = make(c.spec);
        CAPTURE(c.spec);
        check_metric_axioms(*s, s->ball(s->basepoint(), c.radius));
    }
}

TEST_CASE("sqrt_rays triangle inequality up to level 200") {
    for (bool bridges : {false, true}) {
        auto s = build_space(SpaceSpec::parse(
            bridges ? R"({"kind":"sqrt_rays","bridges":true})"
                    : R"({"kind":"sqrt_rays"})"));
        std::vector<Point> pts;
        for (std::int64_t t = 0; t <= 200; ++t) {
            pts.push_back(Point{{0, t}});
            if (t >= 1) pts.push_back(Point{{1, t}});
        }
        if (bridges)
            for (std::int64_t n = 2; n * n <= 200; ++n)
                for (std::int64_t j = 1; j < n; ++j)
                    pts.push_back(Point{{2, n, j}});
        // Every pair, with a strided sweep of middle points.
        std::size_t violations = 0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j) {
                double dij = s->distance(pts[i], pts[j]);
                if (std::abs(s->distance(pts[j], pts[i]) - dij) > 1e-12)
                    ++violations;
                for (std::size_t k = 0; k < pts.size(); k += 7)
                    if (dij > s->distance(pts[i], pts[k]) +
                                  s->distance(pts[k], pts[j]) + 1e-9)
                        ++violations;
            }
        CHECK(violations == 0);
    }
}

TEST_CASE("ball properties") {
    for (auto spec : {R"({"kind":"grid2d"})", R"({"kind":"tree","degree":3})",
                      R"({"kind":"sqrt_rays"})"}) {
        auto s = make(spec);
        Point x0 = s->basepoint();
        auto b0 = s->ball(x0, 0);
        CHECK(std::find(b0.begin(), b0.end(), x0) != b0.end());
        auto b1 = s->ball(x0, 3);
        auto b2 = s->ball(x0, 5);
        for (auto& p : b1)
            CHECK(std::find(b2.begin(), b2.end(), p) != b2.end());
    }
}

TEST_CASE("coarse ends") {
    SUBCASE("line has two stable ends") {
        auto s = make(R"({"kind":"line"})");
        auto res = coarse_ends(*s, {2, 4, 8}, 64);
        REQUIRE(res.levels.size() == 3);
        for (auto& lvl : res.levels) CHECK(lvl.unbounded_components == 2);
        CHECK(res.stabilized);
    }
    SUBCASE("grid has one stable end") {
        auto s = make(R"({"kind":"grid2d"})");
        auto res = coarse_ends(*s, {2, 4, 8}, 64);
        for (auto& lvl : res.levels) CHECK(lvl.unbounded_components == 1);
        CHECK(res.stabilized);
    }
    SUBCASE("tree branch counts grow") {
        auto s = make(R"({"kind":"tree","degree":4})");
        auto res = coarse_ends(*s, {1, 2, 3}, 12);
        REQUIRE(res.levels.size() == 3);
        CHECK(res.levels[0].unbounded_components == 4);
        CHECK(res.levels[1].unbounded_components == 12);
        CHECK(res.levels[2].unbounded_components == 36);
        CHECK(!res.stabilized);
    }
    SUBCASE("empty schedule is an error") {
        auto s = make(R"({"kind":"line"})");
        CHECK_THROWS_AS(coarse_ends(*s, {}, 8), SpaceError);
    }
}

TEST_CASE("point codecs round-trip") {
    for (auto spec : {R"({"kind":"line"})", R"({"kind":"grid2d"})",
                      R"({"kind":"tree","degree":4})",
                      R"({"kind":"wedge_flats"})", R"({"kind":"sqrt_rays"})",
                      R"({"kind":"block_union"})"}) {
        auto s = make(spec);
        auto pts = s->ball(s->basepoint(), 3);
        for (auto& p : pts) {
            CHECK(s->decode(s->encode(p)) == p);
        }
    }
}

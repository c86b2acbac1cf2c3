#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "oracle.hpp"
#include "qgb/qgeo.hpp"

using namespace qgb;
using namespace qgb::qgeo;

namespace {

std::shared_ptr<const SpaceHandle> make(const std::string& spec) {
    return build_space(SpaceSpec::parse(spec));
}

std::vector<Point> line_pts(std::initializer_list<std::int64_t> xs) {
    std::vector<Point> out;
    for (auto x : xs) out.push_back(Point{{x}});
    return out;
}

// Exponential square spiral: legs 1,1,2,2,4,4,... cycling E,N,W,S, so each
// revolution doubles the radius.
std::vector<Point> spiral_path(int doublings) {
    std::vector<Point> out{Point{{0, 0}}};
    std::int64_t x = 0, y = 0;
    const std::int64_t dx[4] = {1, 0, -1, 0};
    const std::int64_t dy[4] = {0, 1, 0, -1};
    std::int64_t len = 1;
    int dir = 0;
    for (int leg = 0; leg < 2 * doublings; ++leg) {
        for (std::int64_t t = 0; t < len; ++t) {
            x += dx[dir];
            y += dy[dir];
            out.push_back(Point{{x, y}});
        }
        dir = (dir + 1) % 4;
        if (leg % 2 == 1) len *= 2;
    }
    return out;
}

}  // namespace

TEST_CASE("validate") {
    auto line = make(R"({"kind":"line"})");
    CHECK(validate(*line, line_pts({0, 1, 2, 3}), 1, 0).ok);

    auto bad = validate(*line, line_pts({0, 1, 0}), 1, 0);
    REQUIRE(!bad.ok);
    CHECK(bad.violation->i == 1);
    CHECK(bad.violation->j == 3);
    CHECK(bad.violation->lower);

    auto grid = make(R"({"kind":"grid2d"})");
    auto sp = spiral_path(8);
    CHECK(validate(*grid, sp, 32, 32).ok);
    CHECK_THROWS(validate(*line, {}, 1, 0));
    CHECK_THROWS(validate(*line, line_pts({0}), 0.5, 0));
}

TEST_CASE("fan enumeration matches frozen counts") {
    auto line = make(R"({"kind":"line"})");
    auto grid = make(R"({"kind":"grid2d"})");
    auto tree = make(R"({"kind":"tree","degree":4})");
    CHECK(enumerate_fan(*line, line->basepoint(), 1, 0, 4, 1 << 20)
              .members.size() == 2);
    CHECK(enumerate_fan(*grid, grid->basepoint(), 1, 0, 3, 1 << 20)
              .members.size() == 12);
    CHECK(enumerate_fan(*tree, tree->basepoint(), 1, 0, 3, 1 << 20)
              .members.size() == 12);
}

TEST_CASE("fan enumeration matches the brute-force oracle") {
    struct Cfg {
        const char* spec;
        double q, Q;
        std::int64_t n;
    };
    for (auto& c : std::initializer_list<Cfg>{
             {R"({"kind":"line"})", 1, 0, 4},
             {R"({"kind":"line"})", 1, 1, 4},
             {R"({"kind":"line"})", 2, 2, 4},
             {R"({"kind":"grid2d"})", 1, 0, 4},
             {R"({"kind":"grid2d"})", 1, 1, 3},
             {R"({"kind":"grid2d"})", 2, 2, 3},
             {R"({"kind":"tree","degree":4})", 1, 0, 4},
             {R"({"kind":"tree","degree":4})", 1, 1, 3},
             {R"({"kind":"tree","degree":4})", 2, 2, 3},
         }) {
        auto s = make(c.spec);
        CAPTURE(c.spec);
        CAPTURE(c.q);
        CAPTURE(c.Q);
        CAPTURE(c.n);
        auto fan = enumerate_fan(*s, s->basepoint(), c.q, c.Q, c.n, 1 << 24);
        REQUIRE(!fan.truncated);
        auto expected = oracle::brute_fan(*s, s->basepoint(), c.q, c.Q, c.n);
        REQUIRE(fan.members.size() == expected.size());
        CHECK(fan.members == expected);
    }
}

TEST_CASE("fan members validate; restriction is monotone") {
    auto grid = make(R"({"kind":"grid2d"})");
    auto f3 = enumerate_fan(*grid, grid->basepoint(), 1, 1, 3, 1 << 22);
    auto f4 = enumerate_fan(*grid, grid->basepoint(), 1, 1, 4, 1 << 22);
    for (auto& mem : f4.members) {
        CHECK(validate(*grid, mem, 1, 1).ok);
        std::vector<Point> prefix(mem.begin(), mem.end() - 1);
        CHECK(std::binary_search(
            f3.members.begin(), f3.members.end(), prefix,
            [&](const std::vector<Point>& a, const std::vector<Point>& b) {
                for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
                    if (grid->less(a[i], b[i])) return true;
                    if (grid->less(b[i], a[i])) return false;
                }
                return a.size() < b.size();
            }));
    }
}

TEST_CASE("thread filter") {
    auto line = make(R"({"kind":"line"})");
    auto grid = make(R"({"kind":"grid2d"})");
    auto right = make_ray(line, "axis+x", 1, 0, 4);

    auto lv4 = enumerate_fan(*line, line->basepoint(), 1, 0, 4, 1 << 20);
    auto th = thread_filter(lv4.members, right, 2);
    REQUIRE(th.size() == 1);
    CHECK(th[0] == line_pts({0, 1, 2, 3}));

    auto gx = make_ray(grid, "axis+x", 1, 0, 3);
    auto gl3 = enumerate_fan(*grid, grid->basepoint(), 1, 0, 3, 1 << 20);
    CHECK(thread_filter(gl3.members, gx, 1).size() == 12);
    CHECK(thread_filter(gl3.members, gx, 2).size() == 3);
}

TEST_CASE("restrict") {
    auto line = make(R"({"kind":"line"})");
    auto right = make_ray(line, "axis+x", 1, 0, 5);
    auto r3 = restrict_qg(right, 3);
    CHECK(r3.pts == line_pts({0, 1, 2}));
    CHECK(validate(r3).ok);
    CHECK(restrict_qg(right, 5).pts == right.pts);
    CHECK_THROWS(restrict_qg(right, 6));
}

TEST_CASE("cone on the line is rigid") {
    auto line = make(R"({"kind":"line"})");
    auto right = make_ray(line, "axis+x", 1, 0, 10);
    auto res = cone(*line, 1, 0, right, 3, 10, 1 << 20);
    CHECK(res.exhausted);
    REQUIRE(res.members.size() == 8);  // (x, i): x = i-1, 3 <= i <= 10
    for (auto& mem : res.members) {
        CHECK(mem.point.w[0] == mem.index - 1);
        CHECK(validate(*line, mem.witness, 1, 0).ok);
    }
}

TEST_CASE("grid cone contains the far axis point (targeted)") {
    auto grid = make(R"({"kind":"grid2d"})");
    auto gx = make_ray(grid, "axis+x", 1, 0, 48);
    auto res = cone_membership(*grid, 2, 2, gx, 4, 48, Point{{0, 10}}, 4,
                               200000);
    REQUIRE(res.verdict == Tri::In);
    CHECK(validate(*grid, res.witness->witness, 2, 2).ok);
    CHECK(res.witness->witness[res.witness->index - 1] == Point{{0, 10}});
}

TEST_CASE("grid cone fatness probe") {
    auto grid = make(R"({"kind":"grid2d"})");
    auto gx = make_ray(grid, "axis+x", 1, 0, 12);
    auto res = cone(*grid, 2, 2, gx, 2, 8, 1 << 22);
    bool has_fat = false;
    for (auto& mem : res.members)
        has_fat = has_fat || mem.point.w[1] >= std::max<std::int64_t>(
                                                   1, mem.point.w[0]);
    CHECK(has_fat);
}

TEST_CASE("cone nesting") {
    auto grid = make(R"({"kind":"grid2d"})");
    auto gx = make_ray(grid, "axis+x", 1, 0, 12);
    auto c2 = cone(*grid, 1, 1, gx, 2, 6, 1 << 22);
    auto c3 = cone(*grid, 1, 1, gx, 3, 6, 1 << 22);
    REQUIRE(c2.exhausted);
    REQUIRE(c3.exhausted);
    for (auto& mem : c3.members) {
        if (mem.index < 3) continue;
        bool found = false;
        for (auto& m2 : c2.members)
            found = found || (m2.point == mem.point && m2.index == mem.index);
        CHECK(found);
    }
}

TEST_CASE("extract_limit_ray") {
    auto line = make(R"({"kind":"line"})");
    SUBCASE("line prefixes") {
        std::vector<QuasiGeodesic> family;
        for (std::int64_t n = 5; n <= 50; ++n)
            family.push_back(materialized(make_ray(line, "axis+x", 1, 1), n));
        auto res = extract_limit_ray(*line, family, 1, 2, 5);
        CHECK(res.reached_requested_depth);
        CHECK(res.ray.pts == line_pts({0, 1, 2, 3, 4}));
        CHECK(validate(res.ray, 1, 1 + 2 * 2).ok);
    }
    SUBCASE("grid geodesics to (n,1)") {
        auto grid = make(R"({"kind":"grid2d"})");
        std::vector<QuasiGeodesic> family;
        for (std::int64_t n = 5; n <= 50; ++n) {
            QuasiGeodesic g;
            g.space = grid;
            g.q = 1;
            g.Q = 1;
            g.name = "to(" + std::to_string(n) + ",1)";
            for (std::int64_t i = 1; i <= n; ++i)
                g.pts.push_back(Point{{i - 1, 0}});
            g.pts.push_back(Point{{n - 1, 1}});
            family.push_back(std::move(g));
        }
        auto res = extract_limit_ray(*grid, family, 1, 2, 5);
        CHECK(res.reached_requested_depth);
        CHECK(validate(res.ray, 1, 5).ok);
        for (std::int64_t i = 1; i <= res.ray.length(); ++i)
            CHECK(grid->distance(res.ray.at(i), Point{{i - 1, 0}}) <= 2);
    }
    SUBCASE("family too small reports achieved depth") {
        std::vector<QuasiGeodesic> family;
        for (std::int64_t n = 2; n <= 3; ++n)
            family.push_back(materialized(make_ray(line, "axis+x", 1, 1), n));
        auto res = extract_limit_ray(*line, family, 1, 2, 9);
        CHECK(!res.reached_requested_depth);
        CHECK(res.achieved_depth == 3);
    }
}

TEST_CASE("product_concat") {
    auto line = make(R"({"kind":"line"})");
    auto prod = make(R"({"kind":"product","a":{"kind":"line"},"b":{"kind":"line"}})");
    auto f = materialized(make_ray(line, "axis+x", 1, 1), 4);
    auto g = materialized(make_ray(line, "axis+x", 1, 1), 4);
    auto h = product_concat(prod, *line, *line, f, g);
    CHECK(h.length() == 7);
    CHECK(validate(*prod, h.pts, 2, 2).ok);

    SUBCASE("degenerate first leg") {
        auto f1 = materialized(make_ray(line, "axis+x", 1, 1), 1);
        auto h1 = product_concat(prod, *line, *line, f1, g);
        CHECK(h1.length() == 4);
        CHECK(validate(*prod, h1.pts, 2, 2).ok);
    }

    SUBCASE("random (1,1) tree paths in tree x tree") {
        auto tree = make(R"({"kind":"tree","degree":3})");
        auto pp = make(
            R"({"kind":"product","a":{"kind":"tree","degree":3},"b":{"kind":"tree","degree":3}})");
        std::mt19937_64 rng(5);
        auto random_path = [&](std::int64_t len) {
            QuasiGeodesic g2;
            g2.space = tree;
            g2.q = 1;
            g2.Q = 1;
            g2.pts.push_back(tree->basepoint());
            while (g2.length() < len) {
                auto cands = tree->ball(g2.pts.back(), 2);
                std::shuffle(cands.begin(), cands.end(), rng);
                bool extended = false;
                for (auto& y : cands) {
                    auto trial = g2.pts;
                    trial.push_back(y);
                    if (validate(*tree, trial, 1, 1).ok) {
                        g2.pts = std::move(trial);
                        extended = true;
                        break;
                    }
                }
                if (!extended) break;
            }
            return g2;
        };
        int checked = 0;
        for (int t = 0; t < 100; ++t) {
            auto a = random_path(6);
            auto b = random_path(6);
            if (a.length() < 2 || b.length() < 2) continue;
            auto hc = product_concat(pp, *tree, *tree, a, b);
            CHECK(validate(*pp, hc.pts, 2, 2).ok);
            ++checked;
        }
        CHECK(checked >= 90);
    }
}

TEST_CASE("net_pushforward") {
    auto grid = make(R"({"kind":"grid2d"})");
    SUBCASE("tiny separation keeps everything") {
        auto g = materialized(make_ray(grid, "axis+x", 1, 0), 5);
        auto res = net_pushforward(*grid, g, 0.5);
        CHECK(res.pushed.pts == g.pts);
    }
    SUBCASE("M=2 on the +x geodesic") {
        auto g = materialized(make_ray(grid, "axis+x", 1, 0), 20);
        auto res = net_pushforward(*grid, g, 2);
        CHECK(validate(*grid, res.pushed.pts, 5, 5).ok);
        for (std::int64_t i = 1; i <= g.length(); ++i)
            CHECK(grid->distance(res.pushed.at(i), g.at(i)) < 2);
        // net separation
        for (std::size_t a = 0; a < res.net.size(); ++a)
            for (std::size_t b = a + 1; b < res.net.size(); ++b)
                CHECK(grid->distance(res.net[a], res.net[b]) >= 2);
    }
}

TEST_CASE("hausdorff_close") {
    auto grid = make(R"({"kind":"grid2d"})");
    auto gx = materialized(make_ray(grid, "axis+x", 1, 0), 100);
    CHECK(hausdorff_close(gx, gx, 0, 100));

    QuasiGeodesic shifted = gx;
    for (auto& p : shifted.pts) p.w[1] += 1;
    CHECK(hausdorff_close(gx, shifted, 1, 100));

    auto gy = materialized(make_ray(grid, "axis+y", 1, 0), 100);
    CHECK(!hausdorff_close(gx, gy, 10, 100));
}

TEST_CASE("boundedly_approaches") {
    auto grid = make(R"({"kind":"grid2d"})");
    auto gx = materialized(make_ray(grid, "axis+x", 1, 0), 60);

    SUBCASE("prefixes approach with C=1") {
        std::vector<QuasiGeodesic> seq;
        for (std::int64_t n = 3; n <= 40; ++n) seq.push_back(restrict_qg(gx, n));
        auto res = boundedly_approaches(seq, gx, 1,
                                        {{5, 1}, {10, 5}, {20, 10}});
        CHECK(res.ok);
    }
    SUBCASE("geodesics to (n,1) approach with C=2") {
        std::vector<QuasiGeodesic> seq;
        for (std::int64_t n = 3; n <= 40; ++n) {
            QuasiGeodesic g;
            g.space = grid;
            g.q = 1;
            g.Q = 1;
            for (std::int64_t i = 1; i <= n; ++i)
                g.pts.push_back(Point{{i - 1, 0}});
            g.pts.push_back(Point{{n - 1, 1}});
            seq.push_back(std::move(g));
        }
        auto res = boundedly_approaches(seq, gx, 2, {{5, 10}, {20, 25}});
        CHECK(res.ok);
    }
    SUBCASE("the +y family does not approach +x") {
        std::vector<QuasiGeodesic> seq;
        auto gy = materialized(make_ray(grid, "axis+y", 1, 0), 45);
        for (std::int64_t n = 3; n <= 40; ++n) seq.push_back(restrict_qg(gy, n));
        auto res = boundedly_approaches(seq, gx, 2, {{3, 1}});
        CHECK(!res.ok);
        REQUIRE(res.failure.has_value());
        CHECK(std::get<0>(*res.failure) == 3);
    }
}

TEST_CASE("bounded approach limit validates with widened constants") {
    // The stabilized pointwise limit of an approaching family is a
    // (k, k+2C)-quasi-geodesic.
    auto grid = make(R"({"kind":"grid2d"})");
    std::mt19937_64 rng(17);
    int done = 0;
    for (int inst = 0; inst < 50; ++inst) {
        std::uniform_int_distribution<std::int64_t> bump(0, 1);
        std::vector<QuasiGeodesic> seq;
        std::vector<Point> limit;
        for (std::int64_t i = 1; i <= 30; ++i) limit.push_back(Point{{i - 1, 0}});
        for (std::int64_t n = 5; n <= 34; ++n) {
            QuasiGeodesic g;
            g.space = grid;
            g.q = 2;
            g.Q = 2;
            for (std::int64_t i = 1; i <= n; ++i) {
                std::int64_t b = bump(rng);
                g.pts.push_back(Point{{i - 1, b}});
            }
            if (!validate(g).ok) continue;
            seq.push_back(std::move(g));
        }
        if (seq.size() < 10) continue;
        QuasiGeodesic lim;
        lim.space = grid;
        lim.q = 2;
        lim.Q = 2;
        lim.pts = limit;
        auto res = boundedly_approaches(seq, lim, 2, {{10, 1}});
        REQUIRE(res.ok);
        CHECK(validate(*grid, limit, 2, 2 + 2 * 2).ok);
        ++done;
    }
    CHECK(done >= 40);
}

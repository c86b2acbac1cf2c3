#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "qgb/boundary.hpp"

using namespace qgb;
using namespace qgb::qgeo;
using namespace qgb::boundary;

namespace {

std::shared_ptr<const SpaceHandle> make(const std::string& spec) {
    return build_space(SpaceSpec::parse(spec));
}

MergeParams params(double k, std::int64_t m_star, std::int64_t N,
                   std::int64_t T = 2, double dd = 0.5,
                   std::uint64_t budget = 200000) {
    MergeParams p;
    p.k = k;
    p.m_star = m_star;
    p.N = N;
    p.T = T;
    p.delta_depth = dd;
    p.budget = budget;
    return p;
}

}  // namespace

TEST_CASE("inverse system levels") {
    SUBCASE("line") {
        auto s = make(R"({"kind":"line"})");
        auto sys = build_inverse_system(*s, 1, 0, 6, 1 << 22);
        REQUIRE(sys.levels.size() == 6);
        CHECK(sys.levels[0].members.size() == 1);
        for (std::size_t n = 2; n <= 6; ++n)
            CHECK(sys.levels[n - 1].members.size() == 2);
        CHECK(sys.retractions_ok);
        CHECK(!sys.truncated);
    }
    SUBCASE("grid level 3") {
        auto s = make(R"({"kind":"grid2d"})");
        auto sys = build_inverse_system(*s, 1, 0, 3, 1 << 22);
        CHECK(sys.levels[2].members.size() == 12);
        CHECK(sys.retractions_ok);
    }
    SUBCASE("tree grows like 4*3^(n-2)") {
        auto s = make(R"({"kind":"tree","degree":4})");
        auto sys = build_inverse_system(*s, 1, 0, 6, 1 << 22);
        std::size_t expect = 4;
        for (std::size_t n = 2; n <= 6; ++n) {
            CHECK(sys.levels[n - 1].members.size() == expect);
            expect *= 3;
        }
        CHECK(sys.retractions_ok);
    }
    SUBCASE("budget truncation is flagged") {
        auto s = make(R"({"kind":"grid2d"})");
        auto sys = build_inverse_system(*s, 2, 2, 6, 50);
        CHECK(sys.truncated);
    }
}

TEST_CASE("gromov product") {
    auto line = make(R"({"kind":"line"})");
    Point z{{0}}, p5{{5}}, m3{{-3}}, p3{{3}};
    CHECK(gromov_product(*line, p5, m3, z) == 0.0);
    CHECK(gromov_product(*line, p5, p3, z) == 3.0);
    CHECK(gromov_product(*line, p5, p5, z) == line->distance(p5, z));

    auto tree = make(R"({"kind":"tree","degree":4})");
    // two leaves below a common ancestor at depth 3
    Point anc{{0, 0, 0}};
    Point leaf1{{0, 0, 0, 0, 1}};
    Point leaf2{{0, 0, 0, 1, 0, 2}};
    CHECK(gromov_product(*tree, leaf1, leaf2, tree->basepoint()) == 3.0);

    for (auto& x : tree->ball(tree->basepoint(), 3))
        for (auto& y : tree->ball(tree->basepoint(), 3))
            CHECK(gromov_product(*tree, x, y, tree->basepoint()) >= 0.0);
}

TEST_CASE("delta estimate") {
    DeltaSampleSpec spec;
    SUBCASE("trees are 0-hyperbolic") {
        auto s = make(R"({"kind":"tree","degree":4})");
        spec.radius = 5;
        auto est = estimate_delta(*s, spec);
        CHECK(est.delta_hat == 0.0);
    }
    SUBCASE("line is 0-hyperbolic") {
        auto s = make(R"({"kind":"line"})");
        spec.radius = 20;
        CHECK(estimate_delta(*s, spec).delta_hat == 0.0);
    }
    SUBCASE("grid delta grows with the sample radius") {
        auto s = make(R"({"kind":"grid2d"})");
        spec.radius = 4;
        double d4 = estimate_delta(*s, spec).delta_hat;
        spec.radius = 8;
        double d8 = estimate_delta(*s, spec).delta_hat;
        CHECK(d4 > 0.0);
        CHECK(d8 > d4);
    }
    SUBCASE("random quadruples on the tree stay at 0") {
        auto s = make(R"({"kind":"tree","degree":3})");
        spec.mode = DeltaSampleSpec::Mode::RandomQuadruples;
        spec.radius = 6;
        spec.count = 20000;
        CHECK(estimate_delta(*s, spec).delta_hat == 0.0);
    }
}

TEST_CASE("merge_test on the grid: one boundary point") {
    auto grid = make(R"({"kind":"grid2d"})");
    auto px = make_ray(grid, "axis+x", 1, 0);
    auto py = make_ray(grid, "axis+y", 1, 0);
    auto mx = make_ray(grid, "axis-x", 1, 0);

    SUBCASE("reflexive") {
        auto v = merge_test(px, px, params(2, 4, 48));
        CHECK(v.merged());
    }
    SUBCASE("+x merges with +y with validated deep witnesses") {
        auto v = merge_test(px, py, params(2, 4, 48));
        REQUIRE(v.merged());
        REQUIRE(v.witnesses_gh.size() >= 2);
        for (auto& w : v.witnesses_gh) {
            CHECK(w.cone_index >= 24);
            CHECK(validate(*grid, w.path, 2, 0).ok);
            CHECK(w.path[w.cone_index - 1] == w.point);
            CHECK(w.point.w[0] == 0);  // a point of the +y ray
        }
        REQUIRE(v.witnesses_hg.size() >= 2);
    }
    SUBCASE("+x merges with -x (around the basepoint, lifted)") {
        auto v = merge_test(px, mx, params(2, 4, 48));
        CHECK(v.merged());
    }
    SUBCASE("symmetry") {
        auto a = merge_test(px, py, params(2, 4, 48));
        auto b = merge_test(py, px, params(2, 4, 48));
        CHECK(a.status == b.status);
    }
    SUBCASE("witnesses survive larger N") {
        auto v = merge_test(px, py, params(2, 4, 64));
        CHECK(v.merged());
    }
}

TEST_CASE("merge_test on the tree: branches provably disjoint") {
    auto tree = make(R"({"kind":"tree","degree":4})");
    auto b0 = make_ray(tree, "branch:0", 1, 0);
    auto b1 = make_ray(tree, "branch:1", 1, 0);
    auto v = merge_test(b0, b1, params(2, 6, 30));
    CHECK(v.status == MergeStatus::ProvablyDisjointAtScale);
    CHECK(v.disjoint_scale_m == 6);
    CHECK(v.witnesses_gh.empty());
}

TEST_CASE("merge_test on the line: two ends") {
    auto line = make(R"({"kind":"line"})");
    auto r = make_ray(line, "axis+x", 1, 0);
    auto l = make_ray(line, "axis-x", 1, 0);
    auto v = merge_test(r, l, params(2, 4, 48));
    CHECK(v.status == MergeStatus::ProvablyDisjointAtScale);
}

TEST_CASE("hausdorff shortcut") {
    auto grid = make(R"({"kind":"grid2d"})");
    auto gx = materialized(make_ray(grid, "axis+x", 1, 0), 100);
    QuasiGeodesic shifted = gx;
    shifted.generator.reset();
    shifted.name = "shifted";
    for (auto& p : shifted.pts) p.w[1] += 1;
    shifted.q = 1;
    shifted.Q = 2;
    CHECK(hausdorff_merge(gx, shifted, 1, 100).merged());

    auto tree = make(R"({"kind":"tree","degree":4})");
    auto b0 = make_ray(tree, "branch:0", 1, 0);
    auto b1 = make_ray(tree, "branch:1", 1, 0);
    CHECK(!hausdorff_merge(b0, b1, 4, 30).merged());

    auto g20 = materialized(make_ray(grid, "axis+x", 1, 0), 20);
    auto net = net_pushforward(*grid, g20, 2);
    CHECK(hausdorff_merge(g20, net.pushed, 2, 20).merged());
}

TEST_CASE("boundary partitions") {
    SUBCASE("grid: six rays, one class") {
        auto grid = make(R"({"kind":"grid2d"})");
        PartitionParams pp;
        pp.merge = params(2, 4, 48);
        std::vector<QuasiGeodesic> rays;
        for (auto tag : {"axis+x", "axis-x", "axis+y", "axis-y"})
            rays.push_back(make_ray(grid, tag, 1, 0));
        rays.push_back(make_ray(grid, "diag:ne", 2, 2));
        rays.push_back(make_ray(grid, "diag:se", 2, 2));
        auto part = boundary_partition(rays, pp);
        CHECK(part.classes.size() == 1);
    }
    SUBCASE("tree: four branches, four classes") {
        auto tree = make(R"({"kind":"tree","degree":4})");
        PartitionParams pp;
        pp.merge = params(2, 6, 30);
        std::vector<QuasiGeodesic> rays;
        for (int b = 0; b < 4; ++b)
            rays.push_back(
                make_ray(tree, "branch:" + std::to_string(b), 1, 0));
        auto part = boundary_partition(rays, pp);
        CHECK(part.classes.size() == 4);
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = i + 1; j < 4; ++j)
                CHECK(part.verdicts[i][j] ==
                      MergeStatus::ProvablyDisjointAtScale);
    }
    SUBCASE("wedge flats: distinct flats and line ends stay apart") {
        auto w = make(R"({"kind":"wedge_flats"})");
        PartitionParams pp;
        pp.merge = params(2, 10, 60);
        std::vector<QuasiGeodesic> rays{
            make_ray(w, "flat:3:x", 1, 0), make_ray(w, "flat:5:x", 1, 0),
            make_ray(w, "line+", 1, 0), make_ray(w, "line-", 1, 0)};
        auto part = boundary_partition(rays, pp);
        CHECK(part.classes.size() == 4);
    }
    SUBCASE("wedge flats: two rays in one flat merge") {
        auto w = make(R"({"kind":"wedge_flats"})");
        auto a = make_ray(w, "flat:3:x", 1, 0);
        auto b = make_ray(w, "flat:3:y", 1, 0);
        auto v = merge_test(a, b, params(2, 10, 96));
        CHECK(v.merged());
    }
    SUBCASE("sqrt_rays: two classes without bridges, one with") {
        auto s0 = make(R"({"kind":"sqrt_rays"})");
        PartitionParams pp;
        pp.merge = params(2, 12, 60);
        std::vector<QuasiGeodesic> rays{make_ray(s0, "horizontal", 1, 0),
                                        make_ray(s0, "vertical", 1, 0)};
        auto part = boundary_partition(rays, pp);
        CHECK(part.classes.size() == 2);
        CHECK(part.verdicts[0][1] == MergeStatus::ProvablyDisjointAtScale);

        auto s1 = make(R"({"kind":"sqrt_rays","bridges":true})");
        std::vector<QuasiGeodesic> rays1{make_ray(s1, "horizontal", 1, 0),
                                         make_ray(s1, "vertical", 1, 0)};
        auto part1 = boundary_partition(rays1, pp);
        CHECK(part1.classes.size() == 1);
    }
}

TEST_CASE("ray ends") {
    SUBCASE("line: left and right ends for every radius") {
        auto line = make(R"({"kind":"line"})");
        auto r = ray_to_end(*line, make_ray(line, "axis+x", 1, 0), {2, 4, 8},
                            64);
        auto l = ray_to_end(*line, make_ray(line, "axis-x", 1, 0), {2, 4, 8},
                            64);
        REQUIRE(r.resolved_all_radii);
        REQUIRE(l.resolved_all_radii);
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(!(r.ends[i].second == l.ends[i].second));
    }
    SUBCASE("tree: distinct branches, distinct ends") {
        auto tree = make(R"({"kind":"tree","degree":4})");
        auto e0 = ray_to_end(*tree, make_ray(tree, "branch:0", 1, 0), {1, 2},
                             9);
        auto e1 = ray_to_end(*tree, make_ray(tree, "branch:1", 1, 0), {1, 2},
                             9);
        for (std::size_t i = 0; i < 2; ++i)
            CHECK(!(e0.ends[i].second == e1.ends[i].second));
    }
    SUBCASE("grid: merged rays share the unique end") {
        auto grid = make(R"({"kind":"grid2d"})");
        auto ex = ray_to_end(*grid, make_ray(grid, "axis+x", 1, 0), {2, 4, 8},
                             48);
        auto ey = ray_to_end(*grid, make_ray(grid, "axis+y", 1, 0), {2, 4, 8},
                             48);
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(ex.ends[i].second == ey.ends[i].second);
    }
    SUBCASE("too short a ray is an error") {
        auto line = make(R"({"kind":"line"})");
        QuasiGeodesic stub;
        stub.space = line;
        stub.q = 1;
        stub.Q = 0;
        stub.pts = {line->basepoint()};
        CHECK_THROWS(ray_to_end(*line, stub, {8}, 64));
    }
}

TEST_CASE("qi pushforward") {
    auto grid = make(R"({"kind":"grid2d"})");
    auto gx = materialized(make_ray(grid, "axis+x", 1, 0), 20);

    SUBCASE("doubling") {
        QiMapSpec ms;
        ms.kind = QiMapSpec::Kind::Scale;
        ms.lambda = 2;
        auto res = qi_pushforward(*grid, ms, gx, 1, 0);
        CHECK(res.q_fit == 2.0);
        CHECK(res.Q_fit == 0.0);
        CHECK(validate(*grid, res.image.pts, 2, 0).ok);
    }
    SUBCASE("coordinate swap preserves constants") {
        QiMapSpec ms;
        ms.kind = QiMapSpec::Kind::Swap;
        auto res = qi_pushforward(*grid, ms, gx, 1, 0);
        CHECK(res.q_fit == 1.0);
        CHECK(res.Q_fit == 0.0);
    }
    SUBCASE("parity bump validates as (1,2)") {
        QiMapSpec ms;
        ms.kind = QiMapSpec::Kind::Perturb;
        ms.magnitude = 1;
        auto res = qi_pushforward(*grid, ms, gx, 1, 0);
        CHECK(validate(*grid, res.image.pts, 1, 2).ok);
        CHECK(res.Q_fit <= 2.0);
    }
}

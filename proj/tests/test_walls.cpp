#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <vector>

#include <sheafstab/detail/rng.hpp>
#include <sheafstab/models.hpp>
#include <sheafstab/walls.hpp>

using namespace sheafstab;

namespace {

using Matrix = std::vector<std::vector<Rational>>;

SheafClass surface_class(const ModelPtr& s, int r0, int a, int b) {
    auto comps = s->zero_components();
    comps[0] = {Rational(r0)};
    comps[1] = {Rational(a), Rational(b)};
    const auto nat = SheafClass::natural_dim(GradedClass(s, comps));
    return SheafClass(GradedClass(s, std::move(comps)), nat ? *nat : 2);
}

CompactRegion surface_region(const ModelPtr& s) {
    return CompactRegion(s, 2, 1,
                         {{2, {Rational(1)}}, {1, {Rational(1), Rational(1)}}},
                         {{2, {{Rational(1)}}},
                          {1, {{Rational(1, 3), Rational(2, 3)}, {Rational(2, 3), Rational(1, 3)}}}});
}

SheafClass threefold_class(const ModelPtr& x, int e0, int a1, int b1) {
    auto comps = x->zero_components();
    comps[0] = {Rational(e0)};
    comps[1] = {Rational(a1), Rational(b1)};
    const auto nat = SheafClass::natural_dim(GradedClass(x, comps));
    return SheafClass(GradedClass(x, std::move(comps)), nat ? *nat : 3);
}

// Prismatic window (alpha_3, alpha_2, alpha_1) over the example threefold:
// K_3 a point, K_2 the segment u = 3, v in [1/2, 2], K_1 the segment
// a = 4, b in [1, 3].
CompactRegion threefold_d3_region(const ModelPtr& x) {
    return CompactRegion(
        x, 3, 1,
        {{3, {Rational(1)}}, {2, {Rational(1, 3), Rational(0)}}, {1, {Rational(1, 4), Rational(0)}}},
        {{3, {{Rational(1)}}},
         {2, {{Rational(3), Rational(1, 2)}, {Rational(3), Rational(2)}}},
         {1, {{Rational(4), Rational(1)}, {Rational(4), Rational(3)}}}});
}

CompactRegion threefold_d2_region(const ModelPtr& x) {
    return CompactRegion(
        x, 2, 1,
        {{2, {Rational(1, 3), Rational(0)}}, {1, {Rational(1, 4), Rational(0)}}},
        {{2, {{Rational(3), Rational(1, 2)}, {Rational(3), Rational(2)}}},
         {1, {{Rational(4), Rational(1)}, {Rational(4), Rational(3)}}}});
}

std::set<std::pair<int, Matrix>> wall_keys(const WallSystem& sys) {
    std::set<std::pair<int, Matrix>> keys;
    for (const auto& w : sys.walls)
        keys.insert({w.level, w.matrix});
    return keys;
}

} // namespace

TEST_CASE("degree rows against the basis classes") {
    const auto s = product_p1_p1();
    const auto gamma = surface_class(s, 2, 1, 1);
    CHECK(degree_row(gamma, 2) == std::vector<Rational>{Rational(2)});
    CHECK(degree_row(gamma, 1) == std::vector<Rational>{Rational(3), Rational(3)});

    const auto x = example_threefold();
    const auto g3 = threefold_class(x, 2, 0, 1);
    CHECK(degree_row(g3, 3) == std::vector<Rational>{Rational(2)});
    CHECK(degree_row(g3, 2) == std::vector<Rational>{Rational(4), Rational(-1)});
    CHECK(degree_row(g3, 1) == std::vector<Rational>{Rational(7, 2), Rational(7, 3)});
}

TEST_CASE("wall between the split summands of the surface class") {
    const auto s = product_p1_p1();
    const auto gamma = surface_class(s, 2, 1, 1);
    const auto f1 = surface_class(s, 1, 1, 0);
    const auto f2 = surface_class(s, 1, 0, 1);

    const auto w1 = build_wall(gamma, f1, 1);
    REQUIRE(w1.has_value());
    CHECK(w1->level == 1);
    CHECK(w1->matrix == Matrix{{Rational(-1), Rational(1)}});

    // the complementary summand produces the same canonical wall
    const auto w2 = build_wall(gamma, f2, 1);
    REQUIRE(w2.has_value());
    CHECK(w2->matrix == w1->matrix);

    // evaluation is y - x on the section
    const SamplePoint left{{2, {Rational(1)}}, {1, {Rational(1, 3), Rational(2, 3)}}};
    const SamplePoint mid{{2, {Rational(1)}}, {1, {Rational(1, 2), Rational(1, 2)}}};
    const SamplePoint right{{2, {Rational(1)}}, {1, {Rational(2, 3), Rational(1, 3)}}};
    CHECK(w1->evaluate(left, 2) == Rational(1, 3));
    CHECK(w1->evaluate(mid, 2) == Rational(0));
    CHECK(w1->evaluate(right, 2) == Rational(-1, 3));

    SECTION("degree-proportional candidates have no wall") {
        CHECK_FALSE(build_wall(gamma, gamma, 1).has_value());
        const SheafClass twice(Rational(2) * gamma.ch, 2);
        CHECK_FALSE(build_wall(gamma, twice, 1).has_value());
    }
    SECTION("level bounds") {
        CHECK_THROWS_AS(build_wall(gamma, f1, 2), ValidationError);
        CHECK_THROWS_AS(build_wall(gamma, f1, -1), ValidationError);
    }
}

TEST_CASE("surface wall system deduplicates and signs correctly") {
    const auto s = product_p1_p1();
    const auto region = surface_region(s);
    const auto gamma = surface_class(s, 2, 1, 1);
    const std::vector<SheafClass> candidates{surface_class(s, 1, 1, 0), surface_class(s, 1, 0, 1)};

    const auto sys = wall_system(gamma, region, candidates, Pruning::AllLevels);
    CHECK(sys.d == 2);
    CHECK(sys.r == 1);
    REQUIRE(sys.walls.size() == 1);
    CHECK(sys.walls[0].level == 1);
    CHECK(sys.walls[0].matrix == Matrix{{Rational(-1), Rational(1)}});
    CHECK(sys.walls[0].candidates == std::vector<std::size_t>{0, 1});
    CHECK(sys.null_walls.empty());
    CHECK_FALSE(sys.bilinear);

    CHECK(sign_vector({{2, {Rational(1)}}, {1, {Rational(1, 3), Rational(2, 3)}}}, sys) == "+");
    CHECK(sign_vector({{2, {Rational(1)}}, {1, {Rational(1, 2), Rational(1, 2)}}}, sys) == "0");
    CHECK(sign_vector({{2, {Rational(1)}}, {1, {Rational(2, 3), Rational(1, 3)}}}, sys) == "-");

    SECTION("a proportional candidate is recorded as a null wall") {
        const std::vector<SheafClass> with_null{candidates[0], SheafClass(Rational(2) * gamma.ch, 2)};
        const auto sys2 = wall_system(gamma, region, with_null, Pruning::AllLevels);
        REQUIRE(sys2.walls.size() == 1);
        CHECK(sys2.walls[0].candidates == std::vector<std::size_t>{0});
        CHECK(sys2.null_walls == std::vector<std::pair<std::size_t, int>>{{1, 1}});
    }
    SECTION("quotient mode lands on the complementary wall") {
        const auto sys2 = wall_system(gamma, region, {candidates[1]}, Pruning::AllLevels,
                                      4, CandidateMode::Quotient);
        REQUIRE(sys2.walls.size() == 1);
        CHECK(sys2.walls[0].matrix == Matrix{{Rational(-1), Rational(1)}});
    }
    SECTION("a quotient equal to gamma nullifies every level") {
        const auto sys2 = wall_system(gamma, region, {gamma}, Pruning::AllLevels,
                                      4, CandidateMode::Quotient);
        CHECK(sys2.walls.empty());
        CHECK(sys2.null_walls == std::vector<std::pair<std::size_t, int>>{{0, 1}});
    }
    SECTION("stratified pruning keeps the crossing wall") {
        const auto strat = wall_system(gamma, region, candidates, Pruning::Stratified);
        REQUIRE(strat.walls.size() == 1);
        CHECK(strat.walls[0].matrix == Matrix{{Rational(-1), Rational(1)}});
        CHECK(strat.walls[0].candidates == std::vector<std::size_t>{0, 1});
    }
}

TEST_CASE("threefold wall system across two levels") {
    const auto x = example_threefold();
    const auto region = threefold_d3_region(x);
    const auto gamma = threefold_class(x, 2, 0, 1);
    const std::vector<SheafClass> candidates{threefold_class(x, 1, 1, 0), threefold_class(x, 1, 0, 1)};

    const auto all = wall_system(gamma, region, candidates, Pruning::AllLevels);
    REQUIRE(all.walls.size() == 4);
    // sorted by level descending, then matrix
    CHECK(all.walls[0].level == 2);
    CHECK(all.walls[0].matrix == Matrix{{Rational(-1), Rational(1)}});
    CHECK(all.walls[0].candidates == std::vector<std::size_t>{1});
    CHECK(all.walls[1].level == 2);
    CHECK(all.walls[1].matrix == Matrix{{Rational(-1, 3), Rational(1)}});
    CHECK(all.walls[1].candidates == std::vector<std::size_t>{0});
    CHECK(all.walls[2].level == 1);
    CHECK(all.walls[2].matrix == Matrix{{Rational(-1, 2), Rational(1)}});
    CHECK(all.walls[2].candidates == std::vector<std::size_t>{0});
    CHECK(all.walls[3].level == 1);
    CHECK(all.walls[3].matrix == Matrix{{Rational(1), Rational(0)}});
    CHECK(all.walls[3].candidates == std::vector<std::size_t>{1});
    CHECK(all.null_walls.empty());
    CHECK_FALSE(all.bilinear);
    CHECK(all.provenance.at(0) == std::vector<int>{1, 2});
    CHECK(all.provenance.at(1) == std::vector<int>{1, 2});

    SECTION("stratified pruning assigns each candidate its top destabilizing level") {
        const auto strat = wall_system(gamma, region, candidates, Pruning::Stratified);
        // candidate 0 destabilizes at level 2 near the vertex (3, 2), candidate 1
        // throughout the region; both level 1 walls are dropped
        REQUIRE(strat.walls.size() == 2);
        CHECK(strat.walls[0].level == 2);
        CHECK(strat.walls[0].matrix == Matrix{{Rational(-1), Rational(1)}});
        CHECK(strat.walls[0].candidates == std::vector<std::size_t>{1});
        CHECK(strat.walls[1].level == 2);
        CHECK(strat.walls[1].matrix == Matrix{{Rational(-1, 3), Rational(1)}});
        CHECK(strat.walls[1].candidates == std::vector<std::size_t>{0});
        CHECK(strat.provenance.at(0) == std::vector<int>{2});
        CHECK(strat.provenance.at(1) == std::vector<int>{2});

        const auto all_keys = wall_keys(all);
        for (const auto& key : wall_keys(strat))
            CHECK(all_keys.count(key) == 1);
    }
    SECTION("stratified pruning drops candidates that never destabilize") {
        // slope of (1, -f - xi) stays below gamma's at both levels everywhere
        const std::vector<SheafClass> weak{threefold_class(x, 1, -1, -1)};
        CHECK_FALSE(wall_system(gamma, region, weak, Pruning::AllLevels).walls.empty());
        const auto strat = wall_system(gamma, region, weak, Pruning::Stratified);
        CHECK(strat.walls.empty());
        CHECK(strat.provenance.count(0) == 0);
    }
    SECTION("sign vectors separate the four chambers") {
        std::set<std::string> signs;
        for (const Rational& v : {Rational(3, 4), Rational(3, 2)})
            for (const Rational& b : {Rational(3, 2), Rational(5, 2)})
                signs.insert(sign_vector({{3, {Rational(1)}},
                                          {2, {Rational(3), v}},
                                          {1, {Rational(4), b}}},
                                         all));
        CHECK(signs.size() == 4);
    }
}

TEST_CASE("rank zero class over the threefold yields one genuinely bilinear wall") {
    const auto x = example_threefold();
    const auto region = threefold_d2_region(x);
    const auto gamma = threefold_class(x, 0, 1, 1);
    const std::vector<SheafClass> candidates{threefold_class(x, 0, 1, 0), threefold_class(x, 0, 0, 1)};

    const auto sys = wall_system(gamma, region, candidates, Pruning::AllLevels);
    REQUIRE(sys.walls.size() == 1);
    CHECK(sys.walls[0].level == 1);
    CHECK(sys.walls[0].matrix ==
          Matrix{{Rational(0), Rational(-1)}, {Rational(1), Rational(1)}});
    CHECK(sys.walls[0].candidates == std::vector<std::size_t>{0, 1});
    CHECK(sys.bilinear);

    // W(x, y) = -u b + v a + v b on coordinates x = (u, v), y = (a, b)
    const SamplePoint pt{{2, {Rational(3), Rational(1)}}, {1, {Rational(4), Rational(2)}}};
    CHECK(sys.walls[0].evaluate(pt, 2) == Rational(0));
}

TEST_CASE("candidate enumeration over the box") {
    const auto s = product_p1_p1();
    const auto region = surface_region(s);
    const auto gamma = surface_class(s, 2, 1, 1);
    const CandidateBox box{{{0, 0, Rational(1), Rational(1), Rational(1)},
                            {1, 0, Rational(-2), Rational(2), Rational(1)},
                            {1, 1, Rational(-2), Rational(2), Rational(1)}}};

    const auto found = enumerate_candidates(gamma, region, box, MPolicy::auto_policy());
    CHECK(found.size() == 19);
    auto contains = [&](int r0, int a, int b) {
        const auto want = surface_class(s, r0, a, b);
        for (const auto& f : found)
            if (f.ch == want.ch)
                return true;
        return false;
    };
    CHECK(contains(1, 1, 0));
    CHECK(contains(1, 0, 1));
    CHECK(contains(1, 0, 0));
    // slope filter: min vertex-pair slope of (1, (1,1)) exceeds the automatic bound
    CHECK_FALSE(contains(1, 1, 1));

    SECTION("explicit slope bound tightens the sweep") {
        const auto strict = enumerate_candidates(gamma, region, box,
                                                 MPolicy::explicit_policy(Rational(0)));
        CHECK(strict.size() == 8);
        CHECK_FALSE([&] {
            for (const auto& f : strict)
                if (f.ch == surface_class(s, 1, 1, 0).ch)
                    return true;
            return false;
        }());
    }
    SECTION("box validation") {
        CHECK_THROWS_AS(enumerate_candidates(gamma, region, CandidateBox{}, MPolicy::auto_policy()),
                        ValidationError);
        CHECK_THROWS_AS(enumerate_candidates(gamma, region,
                                             CandidateBox{{{1, 0, Rational(2), Rational(1), Rational(1)}}},
                                             MPolicy::auto_policy()),
                        ValidationError);
        CHECK_THROWS_AS(enumerate_candidates(gamma, region,
                                             CandidateBox{{{1, 0, Rational(0), Rational(1), Rational(0)}}},
                                             MPolicy::auto_policy()),
                        ValidationError);
        CHECK_THROWS_AS(enumerate_candidates(gamma, region,
                                             CandidateBox{{{1, 0, Rational(0), Rational(1), Rational(1)},
                                                           {1, 0, Rational(0), Rational(1), Rational(1)}}},
                                             MPolicy::auto_policy()),
                        ValidationError);
        CHECK_THROWS_AS(enumerate_candidates(gamma, region,
                                             CandidateBox{{{3, 0, Rational(0), Rational(1), Rational(1)}}},
                                             MPolicy::auto_policy()),
                        ValidationError);
        CHECK_THROWS_WITH(enumerate_candidates(gamma, region,
                                               CandidateBox{{{1, 0, Rational(-500), Rational(500), Rational(1)},
                                                             {1, 1, Rational(-500), Rational(500), Rational(1)}}},
                                               MPolicy::auto_policy()),
                          Catch::Matchers::ContainsSubstring("more than 1000000"));
        const auto rank0 = SheafClass(GradedClass(s, {{Rational(0)},
                                                      {Rational(1), Rational(1)},
                                                      {Rational(0)}}), 2);
        CHECK_THROWS_WITH(enumerate_candidates(rank0, region, box, MPolicy::auto_policy()),
                          Catch::Matchers::ContainsSubstring("nonpositive top degree"));
    }
}

TEST_CASE("region construction and point validation") {
    const auto s = product_p1_p1();

    SECTION("vertices must sit on the section") {
        CHECK_THROWS_WITH(CompactRegion(s, 2, 1,
                                        {{2, {Rational(1)}}, {1, {Rational(1), Rational(1)}}},
                                        {{2, {{Rational(2)}}},
                                         {1, {{Rational(1, 2), Rational(1, 2)}}}}),
                          Catch::Matchers::ContainsSubstring("does not lie on the section"));
    }
    SECTION("vertices must be ample") {
        CHECK_THROWS_WITH(CompactRegion(s, 2, 1,
                                        {{2, {Rational(1)}}, {1, {Rational(1), Rational(1)}}},
                                        {{2, {{Rational(1)}}},
                                         {1, {{Rational(1), Rational(0)}}}}),
                          Catch::Matchers::ContainsSubstring("not ample"));
    }
    SECTION("every window codim needs a frame and vertices") {
        CHECK_THROWS_WITH(CompactRegion(s, 2, 1, {{2, {Rational(1)}}},
                                        {{2, {{Rational(1)}}},
                                         {1, {{Rational(1, 2), Rational(1, 2)}}}}),
                          Catch::Matchers::ContainsSubstring("missing section frame"));
        CHECK_THROWS_WITH(CompactRegion(s, 2, 1,
                                        {{2, {Rational(1)}}, {1, {Rational(1), Rational(1)}}},
                                        {{2, {{Rational(1)}}}}),
                          Catch::Matchers::ContainsSubstring("missing region vertices"));
    }
    SECTION("frames and vertices outside the window are rejected") {
        CHECK_THROWS_AS(CompactRegion(s, 2, 1,
                                      {{0, {Rational(1)}}, {2, {Rational(1)}},
                                       {1, {Rational(1), Rational(1)}}},
                                      {{2, {{Rational(1)}}},
                                       {1, {{Rational(1, 2), Rational(1, 2)}}}}),
                        ValidationError);
        CHECK_THROWS_AS(CompactRegion(s, 2, 1,
                                      {{2, {Rational(1)}}, {1, {Rational(1), Rational(1)}}},
                                      {{2, {{Rational(1)}}},
                                       {1, {{Rational(1, 2), Rational(1, 2)}}},
                                       {0, {{Rational(1)}}}}),
                        ValidationError);
        CHECK_THROWS_AS(CompactRegion(s, 2, 2,
                                      {{2, {Rational(1)}}},
                                      {{2, {{Rational(1)}}}}),
                        ValidationError);
    }
    SECTION("point validation and the induced degree system") {
        const auto region = surface_region(s);
        const SamplePoint good{{2, {Rational(1)}}, {1, {Rational(1, 3), Rational(2, 3)}}};
        CHECK_NOTHROW(region.validate_point(good));
        CHECK_THROWS_AS(region.validate_point({{2, {Rational(1)}}}), ValidationError);
        CHECK_THROWS_AS(region.validate_point({{2, {Rational(1)}},
                                               {1, {Rational(1, 2), Rational(1, 3)}}}),
                        ValidationError);
        CHECK_THROWS_AS(region.validate_point({{2, {Rational(2)}},
                                               {1, {Rational(1, 3), Rational(2, 3)}}}),
                        ValidationError);

        const auto sys = region.system_at(good);
        CHECK(sys.d() == 2);
        CHECK(sys.r() == 1);
        const auto gamma = surface_class(s, 2, 1, 1);
        CHECK(degree(gamma, sys.alpha(1)) == Rational(3));  // 2(x+y) + y + x at (1/3, 2/3)
        CHECK(degree(gamma, sys.alpha(2)) == Rational(2));
    }
}

TEST_CASE("barycentric grids refine the factor polytopes") {
    const auto s = product_p1_p1();
    const auto region = surface_region(s);
    const auto grid = detail::factor_grid(region, 1, 4);
    CHECK(grid.size() == 5);
    bool has_mid = false;
    for (const auto& y : grid) {
        CHECK(region.section_value(1, y) == Rational(1));
        has_mid = has_mid || y == std::vector<Rational>{Rational(1, 2), Rational(1, 2)};
    }
    CHECK(has_mid);
}

TEST_CASE("linear fractional slopes attain their extremes at vertex pairs") {
    const auto s = product_p1_p1();
    detail::Rng rng(99);
    for (int trial = 0; trial < 30; ++trial) {
        Rational t1(static_cast<long long>(1 + rng.below(9)), 10);
        Rational t2(static_cast<long long>(1 + rng.below(9)), 10);
        if (t1 == t2)
            t2 = t1 == Rational(1, 2) ? Rational(7, 10) : Rational(1, 2);
        const CompactRegion region(
            s, 2, 1, {{2, {Rational(1)}}, {1, {Rational(1), Rational(1)}}},
            {{2, {{Rational(1)}}},
             {1, {{t1, Rational(1) - t1}, {t2, Rational(1) - t2}}}});
        const std::vector<Rational> u{Rational(static_cast<long long>(1 + rng.below(5)))};
        const std::vector<Rational> v{rng.positive_rational(6, 4), rng.positive_rational(6, 4)};
        auto dot = [](const std::vector<Rational>& a, const std::vector<Rational>& b) {
            Rational out(0);
            for (std::size_t k = 0; k < a.size(); ++k)
                out += a[k] * b[k];
            return out;
        };
        bool first = true;
        Rational lo, hi;
        for (const auto& [x, y] : region.top_vertex_pairs()) {
            const Rational mu = dot(v, y) / dot(u, x);
            if (first || mu < lo)
                lo = mu;
            if (first || mu > hi)
                hi = mu;
            first = false;
        }
        for (int probe = 0; probe < 20; ++probe) {
            const auto pt = region.sample_point(rng);
            const Rational mu = dot(v, pt.at(1)) / dot(u, pt.at(2));
            CHECK(lo <= mu);
            CHECK(mu <= hi);
        }
    }
}

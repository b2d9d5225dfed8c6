#include <catch2/catch_amalgamated.hpp>

#include <sheafstab/detail/rng.hpp>
#include <sheafstab/models.hpp>
#include <sheafstab/numring.hpp>

using namespace sheafstab;

namespace {

GradedClass cls(const ModelPtr& m, int codim, std::vector<Rational> coeffs) {
    auto comps = m->zero_components();
    comps[static_cast<std::size_t>(codim)] = std::move(coeffs);
    return GradedClass(m, std::move(comps));
}

} // namespace

TEST_CASE("graded class arithmetic and model guards") {
    const auto p2 = projective_space(2);
    const auto h = GradedClass::basis_element(p2, 1, 0);
    const auto two_h = Rational(2) * h;
    CHECK(two_h.coeff(1, 0) == Rational(2));
    CHECK((two_h - h - h).is_zero());
    CHECK(h + h == two_h);
    CHECK((-h).coeff(1, 0) == Rational(-1));
    CHECK(h.pure_codim() == 1);
    CHECK_FALSE((h + GradedClass::unit(p2)).pure_codim().has_value());

    const auto other = projective_space(2);
    CHECK_THROWS_AS(h + GradedClass::basis_element(other, 1, 0), ValidationError);
}

TEST_CASE("multiplication truncates above the dimension and respects the unit") {
    const auto p3 = projective_space(3);
    const auto h = GradedClass::basis_element(p3, 1, 0);
    const auto h2 = multiply(h, h);
    CHECK(h2.coeff(2, 0) == Rational(1));
    const auto h4 = multiply(h2, h2);
    CHECK(h4.is_zero());
    CHECK(multiply(GradedClass::unit(p3), h2) == h2);
    CHECK(integrate(multiply(h, h2)) == Rational(1));
}

TEST_CASE("threefold structure constants reproduce the Grothendieck relation") {
    const auto x = example_threefold();
    const auto f = GradedClass::basis_element(x, 1, 0);
    const auto xi = GradedClass::basis_element(x, 1, 1);
    const auto xi2 = multiply(xi, xi);
    CHECK(xi2.coeff(2, 1) == Rational(1));

    const auto xi3 = multiply(xi, xi2);
    CHECK(xi3.coeff(3, 0) == Rational(-1));
    CHECK(integrate(xi3) == Rational(-1));
    CHECK(integrate(multiply(xi2, f)) == Rational(1));
    CHECK(multiply(f, f).is_zero());
    // xi^3 + f xi^2 = 0
    CHECK((multiply(xi, xi2) + multiply(f, xi2)).is_zero());
}

TEST_CASE("cone membership on the builtins") {
    const auto p2 = projective_space(2);
    const auto h = GradedClass::basis_element(p2, 1, 0);
    CHECK(cone_test(h, true));
    CHECK(cone_test(h, false));
    CHECK_FALSE(cone_test(-h, false));
    CHECK_THROWS_AS(cone_test(GradedClass::zero(p2), true), ValidationError);

    const auto x = example_threefold();
    const auto f = GradedClass::basis_element(x, 1, 0);
    const auto xi = GradedClass::basis_element(x, 1, 1);
    CHECK(cone_test(xi + f, false));
    CHECK_FALSE(cone_test(xi + f, true));
    CHECK(cone_test(xi + Rational(2) * f, true));
    CHECK_FALSE(cone_test(xi - f, false));
    // mixed-codimension classes have no cone
    CHECK_THROWS_AS(cone_test(f + multiply(xi, xi), true), ValidationError);
}

TEST_CASE("degrees vanish beyond the declared dimension") {
    const auto p2 = projective_space(2);
    const auto skyscraper = SheafClass(cls(p2, 2, {Rational(1)}), 0);
    const auto h = GradedClass::basis_element(p2, 1, 0);
    const auto point_class = GradedClass::basis_element(p2, 2, 0);
    CHECK(degree(skyscraper, h) == Rational(0));
    CHECK(degree(skyscraper, GradedClass::unit(p2)) == Rational(1));

    const auto structure_sheaf = SheafClass(GradedClass::unit(p2), 2);
    // chi(O_{P2}) = 1 and deg_h(O) from Riemann-Roch: h.(h + td_1) integrated
    CHECK(degree(structure_sheaf, GradedClass::unit(p2)) == Rational(1));
    CHECK(degree(structure_sheaf, point_class) == Rational(1));
    CHECK(degree(structure_sheaf, h) == Rational(3, 2));
    CHECK_THROWS_AS(degree(structure_sheaf, h + point_class), ValidationError);
}

TEST_CASE("sheaf classes validate the dimension declaration") {
    const auto p2 = projective_space(2);
    const auto h = GradedClass::basis_element(p2, 1, 0);
    CHECK_THROWS_AS(SheafClass(h, 3), ValidationError);
    CHECK_THROWS_AS(SheafClass(h, -1), ValidationError);
    // codim-1 class cannot have dimension 2 spillover rule: components below
    // codim n - dim must vanish; h has codim 1 = n - 1, so dim 1 is fine
    CHECK_NOTHROW(SheafClass(h, 1));
    CHECK_THROWS_AS(SheafClass(GradedClass::unit(p2), 1), ValidationError);
    CHECK(SheafClass::natural_dim(h) == 1);
    CHECK(SheafClass::natural_dim(GradedClass::unit(p2)) == 2);
    CHECK_FALSE(SheafClass::natural_dim(GradedClass::zero(p2)).has_value());
}

TEST_CASE("dual polytope bounds: printed example") {
    const auto b = bound_dual_polytope({Rational(1), Rational(1)}, {Rational(0), Rational(0)},
                                       Rational(1));
    REQUIRE_FALSE(b.empty);
    REQUIRE(b.intervals.size() == 2);
    CHECK(b.intervals[0] == std::make_pair(Rational(0), Rational(1)));
    CHECK(b.intervals[1] == std::make_pair(Rational(0), Rational(1)));

    const auto e = bound_dual_polytope({Rational(1), Rational(1)}, {Rational(2), Rational(2)},
                                       Rational(1));
    CHECK(e.empty);
    CHECK(e.intervals.empty());

    CHECK_THROWS_AS(bound_dual_polytope({Rational(0)}, {Rational(0)}, Rational(1)),
                    ValidationError);
    CHECK_THROWS_AS(bound_dual_polytope({}, {}, Rational(1)), ValidationError);
}

TEST_CASE("dual polytope bounds contain every feasible vertex") {
    // Region {b : sum a_i b_i <= c, b_i >= lo_i}; its vertices are lo with at
    // most one coordinate raised to the constraint plane.
    detail::Rng rng(2024);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t m = 1 + rng.below(3);
        std::vector<Rational> a, lo;
        for (std::size_t j = 0; j < m; ++j) {
            a.push_back(rng.positive_rational(6, 4));
            lo.push_back(rng.rational(5, 3));
        }
        const Rational c = rng.rational(8, 3);
        Rational base(0);
        for (std::size_t j = 0; j < m; ++j)
            base += a[j] * lo[j];

        const auto box = bound_dual_polytope(a, lo, c);
        if (base > c) {
            CHECK(box.empty);
            continue;
        }
        REQUIRE_FALSE(box.empty);
        // the bound formula, coordinatewise
        for (std::size_t j = 0; j < m; ++j) {
            CHECK(box.intervals[j].first == lo[j]);
            CHECK(box.intervals[j].second == (c - (base - a[j] * lo[j])) / a[j]);
        }
        // vertex oracle: lo itself and each single-coordinate raise
        for (std::size_t j = 0; j < m; ++j) {
            auto v = lo;
            v[j] = (c - (base - a[j] * lo[j])) / a[j];
            for (std::size_t i = 0; i < m; ++i) {
                CHECK(box.intervals[i].first <= v[i]);
                CHECK(v[i] <= box.intervals[i].second);
            }
        }
        // random interior feasible points stay inside the box
        for (int s = 0; s < 10; ++s) {
            std::vector<Rational> p = lo;
            Rational budget = c - base;
            for (std::size_t j = 0; j < m; ++j) {
                const Rational share = budget * Rational(1 + rng.below(4), 8);
                p[j] += share / a[j];
                budget -= share;
            }
            for (std::size_t i = 0; i < m; ++i) {
                CHECK(box.intervals[i].first <= p[i]);
                CHECK(p[i] <= box.intervals[i].second);
            }
        }
    }
}

TEST_CASE("corrupt structure tables are rejected at load time") {
    const auto good = example_threefold();

    SECTION("broken associativity") {
        auto d = good->data();
        for (auto& e : d.products)
            if (e.p == 1 && e.i == 0 && e.q == 2 && e.j == 1)
                e.coeffs = {Rational(2)}; // f . xi^2 = 2 pt
        CHECK_THROWS_AS(VarietyModel::create(std::move(d)), ValidationError);
    }
    SECTION("broken commutativity") {
        auto d = good->data();
        // add the transpose of f . xi with a contradictory value
        VarietyModel::ProductEntry e;
        e.p = 1;
        e.q = 1;
        e.i = 1;
        e.j = 0;
        e.coeffs = {Rational(2), Rational(0)};
        d.products.push_back(e);
        CHECK_THROWS_AS(VarietyModel::create(std::move(d)), ValidationError);
    }
    SECTION("duplicate product entry") {
        auto d = good->data();
        d.products.push_back(d.products.front());
        CHECK_THROWS_AS(VarietyModel::create(std::move(d)), ValidationError);
    }
    SECTION("euler characteristic mismatch") {
        auto d = good->data();
        d.euler_char = Rational(2);
        CHECK_THROWS_AS(VarietyModel::create(std::move(d)), ValidationError);
    }
    SECTION("todd must start with the unit") {
        auto d = good->data();
        d.todd[0][0] = Rational(3);
        CHECK_THROWS_AS(VarietyModel::create(std::move(d)), ValidationError);
    }
    SECTION("nef cone without interior") {
        auto d = good->data();
        d.nef_facets[1] = {{Rational(1), Rational(0)}, {Rational(-1), Rational(0)}};
        CHECK_THROWS_AS(VarietyModel::create(std::move(d)), ValidationError);
    }
    SECTION("empty facet list") {
        auto d = good->data();
        d.nef_facets[2].clear();
        CHECK_THROWS_AS(VarietyModel::create(std::move(d)), ValidationError);
    }
    SECTION("non-ample polarization") {
        auto d = good->data();
        d.polarization = {{Rational(1), Rational(-1)}};
        CHECK_THROWS_AS(VarietyModel::create(std::move(d)), ValidationError);
    }
}

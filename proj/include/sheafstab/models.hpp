#pragma once

#include <string>
#include <string_view>

#include "detail/series.hpp"
#include "numring.hpp"

namespace sheafstab {

/// P^n with basis h^p per codimension.  Todd class is the order-n truncation
/// of (h / (1 - e^{-h}))^{n+1}.
inline ModelPtr projective_space(int n) {
    if (n < 1)
        throw ValidationError("projective space needs dimension at least 1");
    VarietyModel::Data d;
    d.name = "p" + std::to_string(n);
    d.dimension = n;
    d.ranks.assign(static_cast<std::size_t>(n) + 1, 1);
    d.basis.resize(static_cast<std::size_t>(n) + 1);
    d.basis[0] = {"1"};
    for (int p = 1; p <= n; ++p)
        d.basis[static_cast<std::size_t>(p)] = {p == 1 ? "h" : "h^" + std::to_string(p)};
    for (int p = 1; p <= n; ++p)
        for (int q = 1; p + q <= n; ++q)
            d.products.push_back({p, q, 0, 0, {Rational(1)}});
    d.integration = {Rational(1)};
    const auto td = detail::series_pow(detail::todd_series(static_cast<std::size_t>(n)),
                                       static_cast<unsigned>(n) + 1, static_cast<std::size_t>(n));
    d.todd.resize(static_cast<std::size_t>(n) + 1);
    for (int p = 0; p <= n; ++p)
        d.todd[static_cast<std::size_t>(p)] = {td[static_cast<std::size_t>(p)]};
    d.euler_char = Rational(1);
    d.nef_facets.assign(static_cast<std::size_t>(n) + 1, {{Rational(1)}});
    d.polarization = {Rational(1)};
    return VarietyModel::create(std::move(d));
}

/// P^1 x P^1 with basis {1}, {h1, h2}, {h1h2}.
inline ModelPtr product_p1_p1() {
    VarietyModel::Data d;
    d.name = "p1xp1";
    d.dimension = 2;
    d.ranks = {1, 2, 1};
    d.basis = {{"1"}, {"h1", "h2"}, {"h1h2"}};
    d.products = {
        {1, 1, 0, 1, {Rational(1)}}, // h1.h2 = h1h2; squares vanish
    };
    d.integration = {Rational(1)};
    d.todd = {{Rational(1)}, {Rational(1), Rational(1)}, {Rational(1)}};
    d.euler_char = Rational(1);
    d.nef_facets = {
        {{Rational(1)}},
        {{Rational(1), Rational(0)}, {Rational(0), Rational(1)}},
        {{Rational(1)}},
    };
    d.polarization = {Rational(1), Rational(1)};
    return VarietyModel::create(std::move(d));
}

/// Projectivization of O + O + O(-1) over P^1.  Basis {1}, {f, xi},
/// {f.xi, xi^2}, {pt} with relations f^2 = 0, xi^3 = -pt, f.xi^2 = pt.
/// The nef cones in codims 1 and 2 are simplicial with the facets below.
inline ModelPtr example_threefold() {
    VarietyModel::Data d;
    d.name = "example-threefold";
    d.dimension = 3;
    d.ranks = {1, 2, 2, 1};
    d.basis = {{"1"}, {"f", "xi"}, {"f.xi", "xi^2"}, {"pt"}};
    const Rational z(0), one(1);
    d.products = {
        // codim 1 x codim 1
        {1, 1, 0, 0, {z, z}},      // f.f = 0
        {1, 1, 0, 1, {one, z}},    // f.xi = f.xi
        {1, 1, 1, 1, {z, one}},    // xi.xi = xi^2
        // codim 1 x codim 2
        {1, 2, 0, 0, {z}},         // f.(f.xi) = 0
        {1, 2, 0, 1, {one}},       // f.xi^2 = pt
        {1, 2, 1, 0, {one}},       // xi.(f.xi) = pt
        {1, 2, 1, 1, {-one}},      // xi.xi^2 = -pt
    };
    d.integration = {one};
    d.todd = {
        {one},
        {Rational(3, 2), Rational(3, 2)},          // (3f + 3xi)/2
        {Rational(13, 6), one},                    // xi^2 + (13/6) f.xi
        {one},
    };
    d.euler_char = one;
    // Coordinates (a, b) for a.f + b.xi: nef iff b >= 0 and a - b >= 0.
    // Coordinates (u, v) for u.f.xi + v.xi^2: nef iff v >= 0 and u - v >= 0.
    d.nef_facets = {
        {{one}},
        {{z, one}, {one, -one}},
        {{z, one}, {one, -one}},
        {{one}},
    };
    d.polarization = {Rational(2), one}; // 2f + xi, interior of the nef cone
    return VarietyModel::create(std::move(d));
}

/// Resolves a builtin name: "p2", "p1xp1", "example-threefold", or "pN:k"
/// for the k-dimensional projective space.
inline ModelPtr builtin_model(std::string_view name) {
    if (name == "p2")
        return projective_space(2);
    if (name == "p1xp1")
        return product_p1_p1();
    if (name == "example-threefold")
        return example_threefold();
    if (name.substr(0, 3) == "pN:") {
        const std::string tail(name.substr(3));
        int k = 0;
        try {
            std::size_t used = 0;
            k = std::stoi(tail, &used);
            if (used != tail.size())
                throw std::invalid_argument(tail);
        } catch (const std::exception&) {
            throw ValidationError("bad projective space dimension '" + tail + "'");
        }
        if (k < 1 || k > 16)
            throw ValidationError("projective space dimension must be in 1..16");
        return projective_space(k);
    }
    throw ValidationError("unknown builtin model '" + std::string(name) + "'");
}

} // namespace sheafstab

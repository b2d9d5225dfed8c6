#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "chambers.hpp"
#include "walls.hpp"

namespace sheafstab::svg {

namespace detail {

inline std::string num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

struct Frame2 {
    double x0, x1, y0, y1;      // world window
    double sx, sy, ox, oy;      // world -> screen affine map
    double px(double x) const { return ox + sx * (x - x0); }
    double py(double y) const { return oy - sy * (y - y0); }
};

/// Line a x + b y + c = 0 clipped to the world window; empty if it misses.
inline std::vector<std::pair<double, double>> clip_line(const Frame2& f, double a, double b,
                                                        double c) {
    std::vector<std::pair<double, double>> pts;
    auto push = [&](double x, double y) {
        for (const auto& [px, py] : pts)
            if (std::abs(px - x) < 1e-9 && std::abs(py - y) < 1e-9)
                return;
        pts.emplace_back(x, y);
    };
    if (b != 0.0) {
        for (double x : {f.x0, f.x1}) {
            const double y = -(a * x + c) / b;
            if (y >= f.y0 - 1e-9 && y <= f.y1 + 1e-9)
                push(x, y);
        }
    }
    if (a != 0.0) {
        for (double y : {f.y0, f.y1}) {
            const double x = -(b * y + c) / a;
            if (x >= f.x0 - 1e-9 && x <= f.x1 + 1e-9)
                push(x, y);
        }
    }
    if (pts.size() > 2)
        pts.resize(2);
    return pts;
}

} // namespace detail

/// Renders walls and chamber representatives of a parameter space whose
/// factors carry exactly 2 coordinates in total beyond the pinned rank-1
/// factors.  Pure function of its inputs; floats appear only here.
inline std::string render_svg(const WallSystem& system, const CompactRegion& region,
                              const ChamberTable& table) {
    int free_codim = -1;
    const auto& model = region.model();
    for (int j = region.r(); j <= region.d(); ++j) {
        if (model->rank(j) < 2)
            continue;
        if (free_codim >= 0 || model->rank(j) != 2)
            throw ValidationError("svg output requires a parameter space with exactly 2 coordinates");
        free_codim = j;
    }
    if (free_codim < 0)
        throw ValidationError("svg output requires a parameter space with exactly 2 coordinates");

    const auto& kverts = region.vertices(free_codim);
    double x0 = kverts[0][0].to_double(), x1 = x0;
    double y0 = kverts[0][1].to_double(), y1 = y0;
    for (const auto& v : kverts) {
        x0 = std::min(x0, v[0].to_double());
        x1 = std::max(x1, v[0].to_double());
        y0 = std::min(y0, v[1].to_double());
        y1 = std::max(y1, v[1].to_double());
    }
    const double span = std::max({x1 - x0, y1 - y0, 0.2});
    const double pad = 0.15 * span;
    detail::Frame2 f{x0 - pad, x1 + pad, y0 - pad, y1 + pad, 0, 0, 0, 0};
    const double view = 560.0, margin = 40.0;
    const double scale = view / std::max(f.x1 - f.x0, f.y1 - f.y0);
    f.sx = f.sy = scale;
    f.ox = margin;
    f.oy = margin + scale * (f.y1 - f.y0);

    // Restriction of a wall to the free plane, with rank-1 factors pinned
    // by their sections; the result is affine linear in (x, y).
    auto restricted = [&](const Wall& w) {
        auto value = [&](double, double, const Rational& rx, const Rational& ry) {
            std::vector<Rational> xv, yv;
            if (region.d() == free_codim)
                xv = {rx, ry};
            else
                xv = {region.vertices(region.d())[0][0]};
            if (w.level == free_codim)
                yv = {rx, ry};
            else
                yv = {region.vertices(w.level)[0][0]};
            return w.evaluate(xv, yv);
        };
        const Rational v00 = value(0, 0, Rational(0), Rational(0));
        const Rational v10 = value(1, 0, Rational(1), Rational(0));
        const Rational v01 = value(0, 1, Rational(0), Rational(1));
        const Rational v11 = value(1, 1, Rational(1), Rational(1));
        const Rational a = v10 - v00, b = v01 - v00;
        if (v11 - v00 != a + b)
            throw Error("wall restriction is not affine linear");
        return std::array<double, 3>{a.to_double(), b.to_double(), v00.to_double()};
    };

    std::string out;
    const double width = view + 2 * margin;
    const double height = scale * (f.y1 - f.y0) + 2 * margin;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::num(width) +
           "\" height=\"" + detail::num(height) + "\" viewBox=\"0 0 " + detail::num(width) + " " +
           detail::num(height) + "\">\n";
    out += "  <rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // K as a polyline through its vertices (closed when more than 2).
    out += "  <polyline fill=\"none\" stroke=\"#333333\" stroke-width=\"2.5\" points=\"";
    for (std::size_t i = 0; i < kverts.size() + (kverts.size() > 2 ? 1 : 0); ++i) {
        const auto& v = kverts[i % kverts.size()];
        if (i)
            out += " ";
        out += detail::num(f.px(v[0].to_double())) + "," + detail::num(f.py(v[1].to_double()));
    }
    out += "\"/>\n";

    for (std::size_t w = 0; w < system.walls.size(); ++w) {
        const auto [a, b, c] = restricted(system.walls[w]);
        if (a == 0.0 && b == 0.0)
            continue;
        const auto seg = detail::clip_line(f, a, b, c);
        if (seg.size() < 2)
            continue;
        out += "  <line x1=\"" + detail::num(f.px(seg[0].first)) + "\" y1=\"" +
               detail::num(f.py(seg[0].second)) + "\" x2=\"" + detail::num(f.px(seg[1].first)) +
               "\" y2=\"" + detail::num(f.py(seg[1].second)) +
               "\" stroke=\"#b22222\" stroke-width=\"1.5\"/>\n";
        const double mx = 0.5 * (seg[0].first + seg[1].first);
        const double my = 0.5 * (seg[0].second + seg[1].second);
        out += "  <text x=\"" + detail::num(f.px(mx) + 6) + "\" y=\"" + detail::num(f.py(my) - 6) +
               "\" font-size=\"12\" fill=\"#b22222\">w" + std::to_string(w) + "</text>\n";
    }

    for (const auto& row : table.rows) {
        const auto& coords = row.representative.at(free_codim);
        const double cx = f.px(coords[0].to_double());
        const double cy = f.py(coords[1].to_double());
        out += "  <circle cx=\"" + detail::num(cx) + "\" cy=\"" + detail::num(cy) +
               "\" r=\"4\" fill=\"#1661b8\"/>\n";
        out += "  <text x=\"" + detail::num(cx + 7) + "\" y=\"" + detail::num(cy + 4) +
               "\" font-size=\"12\" fill=\"#1661b8\">" + row.sign + "</text>\n";
    }
    out += "</svg>\n";
    return out;
}

} // namespace sheafstab::svg

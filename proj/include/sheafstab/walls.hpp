#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "detail/rng.hpp"
#include "stability.hpp"

namespace sheafstab {

/// Affine section of the ample cone in codim j: the rational hyperplane
/// {ell . y = 1} of the coordinate space of N^j.
struct SectionFrame {
    int codim = 0;
    std::vector<Rational> ell;
};

/// One point of the product parameter space: ambient coordinates per codim,
/// each vector lying on its section.
using SamplePoint = std::map<int, std::vector<Rational>>;

/// Product of compact rational polytopes, one factor per codim in [r, d],
/// each given by vertices on the section and inside the ample cone.
class CompactRegion {
public:
    CompactRegion(ModelPtr model, int d, int r,
                  std::vector<SectionFrame> frames,
                  std::map<int, std::vector<std::vector<Rational>>> vertices)
        : model_(std::move(model)), d_(d), r_(r), verts_(std::move(vertices)) {
        const int n = model_->dimension();
        if (!(0 <= r_ && r_ < d_ && d_ <= n))
            throw ValidationError("region window must satisfy 0 <= r < d <= n");
        for (auto& f : frames) {
            if (f.codim < r_ || f.codim > d_)
                throw ValidationError("section frame in codim " + std::to_string(f.codim) +
                                      " outside the window");
            if (f.ell.size() != model_->rank(f.codim))
                throw ValidationError("section functional has wrong length in codim " +
                                      std::to_string(f.codim));
            if (!frames_.emplace(f.codim, std::move(f)).second)
                throw ValidationError("duplicate section frame in codim " + std::to_string(f.codim));
        }
        for (int j = r_; j <= d_; ++j) {
            if (!frames_.count(j))
                throw ValidationError("missing section frame in codim " + std::to_string(j));
            const auto it = verts_.find(j);
            if (it == verts_.end() || it->second.empty())
                throw ValidationError("missing region vertices in codim " + std::to_string(j));
            for (const auto& v : it->second) {
                if (v.size() != model_->rank(j))
                    throw ValidationError("region vertex has wrong length in codim " + std::to_string(j));
                if (section_value(j, v) != Rational(1))
                    throw ValidationError("region vertex in codim " + std::to_string(j) +
                                          " does not lie on the section");
                if (!cone_test(ambient_class(j, v), true))
                    throw ValidationError("region vertex in codim " + std::to_string(j) +
                                          " is not ample");
            }
        }
        for (const auto& [j, unused] : verts_) {
            (void)unused;
            if (j < r_ || j > d_)
                throw ValidationError("region vertices in codim " + std::to_string(j) +
                                      " outside the window");
        }
    }

    const ModelPtr& model() const { return model_; }
    int d() const { return d_; }
    int r() const { return r_; }
    const SectionFrame& frame(int codim) const { return frames_.at(codim); }
    const std::vector<std::vector<Rational>>& vertices(int codim) const { return verts_.at(codim); }

    Rational section_value(int codim, const std::vector<Rational>& coords) const {
        const auto& ell = frames_.at(codim).ell;
        Rational out(0);
        for (std::size_t k = 0; k < ell.size(); ++k)
            out += ell[k] * coords[k];
        return out;
    }

    GradedClass ambient_class(int codim, const std::vector<Rational>& coords) const {
        auto comps = model_->zero_components();
        comps[static_cast<std::size_t>(codim)] = coords;
        return GradedClass(model_, std::move(comps));
    }

    /// Random rational point of the factor polytope: a convex combination of
    /// the vertices with strictly positive integer weights.
    std::vector<Rational> sample_factor(int codim, detail::Rng& rng) const {
        const auto& vs = vertices(codim);
        std::vector<Rational> point(model_->rank(codim), Rational(0));
        Rational total(0);
        for (const auto& v : vs) {
            const Rational w(static_cast<long long>(1 + rng.below(1 << 16)));
            total += w;
            for (std::size_t k = 0; k < point.size(); ++k)
                point[k] += w * v[k];
        }
        for (auto& x : point)
            x /= total;
        return point;
    }

    SamplePoint sample_point(detail::Rng& rng) const {
        SamplePoint pt;
        for (int j = r_; j <= d_; ++j)
            pt[j] = sample_factor(j, rng);
        return pt;
    }

    /// Every pair (vertex of K_d, vertex of K_{d-1}).
    std::vector<std::pair<std::vector<Rational>, std::vector<Rational>>> top_vertex_pairs() const {
        std::vector<std::pair<std::vector<Rational>, std::vector<Rational>>> out;
        for (const auto& x : vertices(d_))
            for (const auto& y : vertices(d_ - 1))
                out.emplace_back(x, y);
        return out;
    }

    void validate_point(const SamplePoint& pt) const {
        for (int j = r_; j <= d_; ++j) {
            const auto it = pt.find(j);
            if (it == pt.end() || it->second.size() != model_->rank(j))
                throw ValidationError("point is missing coordinates in codim " + std::to_string(j));
            if (section_value(j, it->second) != Rational(1))
                throw ValidationError("point in codim " + std::to_string(j) +
                                      " does not lie on the section");
            if (!cone_test(ambient_class(j, it->second), true))
                throw ValidationError("point in codim " + std::to_string(j) + " is not ample");
        }
    }

    /// Degree system with alpha_j read off the point coordinates.
    DegreeSystem system_at(const SamplePoint& pt) const {
        validate_point(pt);
        std::vector<GradedClass> alphas;
        for (int j = r_; j <= d_; ++j)
            alphas.push_back(ambient_class(j, pt.at(j)));
        return DegreeSystem(d_, r_, std::move(alphas));
    }

private:
    ModelPtr model_;
    int d_, r_;
    std::map<int, SectionFrame> frames_;
    std::map<int, std::vector<std::vector<Rational>>> verts_;
};

/// Row vector of degrees of gamma against the basis classes of codim s:
/// deg_{alpha}(gamma) = degree_row(gamma, s) . alpha-coordinates.
inline std::vector<Rational> degree_row(const SheafClass& gamma, int codim) {
    const auto& model = gamma.ch.model();
    std::vector<Rational> row;
    row.reserve(model->rank(codim));
    for (std::size_t k = 0; k < model->rank(codim); ++k)
        row.push_back(degree(gamma, GradedClass::basis_element(model, codim, k)));
    return row;
}

/// Slope wall at level s: zero locus of the bilinear form
/// (x, y) -> deg_y(F) deg_x(gamma) - deg_y(gamma) deg_x(F) with x a codim-d
/// coordinate vector and y a codim-s coordinate vector.  The coefficient
/// matrix is canonical: scaled so its last nonzero entry equals 1.
struct Wall {
    int level = 0;
    std::vector<std::vector<Rational>> matrix; // rank(d) rows x rank(s) cols
    std::vector<std::size_t> candidates;       // contributing candidate indices

    Rational evaluate(const std::vector<Rational>& x, const std::vector<Rational>& y) const {
        Rational out(0);
        for (std::size_t i = 0; i < matrix.size(); ++i) {
            if (x[i].is_zero())
                continue;
            for (std::size_t j = 0; j < matrix[i].size(); ++j)
                out += x[i] * matrix[i][j] * y[j];
        }
        return out;
    }

    Rational evaluate(const SamplePoint& pt, int d) const {
        return evaluate(pt.at(d), pt.at(level));
    }
};

namespace detail {

inline bool canonicalize_matrix(std::vector<std::vector<Rational>>& m) {
    Rational pivot(0);
    for (const auto& row : m)
        for (const auto& x : row)
            if (!x.is_zero())
                pivot = x;
    if (pivot.is_zero())
        return false;
    for (auto& row : m)
        for (auto& x : row)
            x /= pivot;
    return true;
}

} // namespace detail

/// Builds the level-s wall between gamma and the candidate F; nullopt when
/// the form vanishes identically (F degree-proportional to gamma: no wall).
inline std::optional<Wall> build_wall(const SheafClass& gamma, const SheafClass& f, int s) {
    gamma.ch.require_same_model(f.ch);
    const int d = gamma.dim;
    if (s < 0 || s >= d)
        throw ValidationError("wall level must satisfy 0 <= s < d");
    const auto u_gamma = degree_row(gamma, d);
    const auto v_gamma = degree_row(gamma, s);
    const auto u_f = degree_row(f, d);
    const auto v_f = degree_row(f, s);
    Wall w;
    w.level = s;
    w.matrix.assign(u_gamma.size(), std::vector<Rational>(v_gamma.size(), Rational(0)));
    for (std::size_t i = 0; i < u_gamma.size(); ++i)
        for (std::size_t j = 0; j < v_gamma.size(); ++j)
            w.matrix[i][j] = u_gamma[i] * v_f[j] - u_f[i] * v_gamma[j];
    if (!detail::canonicalize_matrix(w.matrix))
        return std::nullopt;
    return w;
}

enum class Pruning { AllLevels, Stratified };

struct MPolicy {
    bool automatic = true;
    Rational value;
    static MPolicy auto_policy() { return {}; }
    static MPolicy explicit_policy(Rational v) { return {false, std::move(v)}; }
};

struct BoxCoord {
    int codim = 0;
    std::size_t index = 0;
    Rational min, max, step;
};

struct CandidateBox {
    std::vector<BoxCoord> coords;
};

/// Lattice enumeration of candidate destabilizer classes inside the box,
/// filtered by the admissibility window at region vertices and by the
/// slope bound M (automatic M: max of gamma's slope over vertex pairs).
inline std::vector<SheafClass> enumerate_candidates(const SheafClass& gamma,
                                                    const CompactRegion& region,
                                                    const CandidateBox& box,
                                                    const MPolicy& policy) {
    const auto& model = gamma.ch.model();
    const int d = region.d();
    if (gamma.dim != d)
        throw ValidationError("class dimension must equal the region's top degree d");
    if (box.coords.empty())
        throw ValidationError("empty candidate box");

    const auto u_gamma = degree_row(gamma, d);
    const auto v_gamma = degree_row(gamma, d - 1);
    auto dot = [](const std::vector<Rational>& a, const std::vector<Rational>& b) {
        Rational out(0);
        for (std::size_t k = 0; k < a.size(); ++k)
            out += a[k] * b[k];
        return out;
    };
    for (const auto& x : region.vertices(d))
        if (dot(u_gamma, x).sign() <= 0)
            throw ValidationError("class has nonpositive top degree at a region vertex");

    // M bound: auto = max slope of gamma over vertex pairs of K_d x K_{d-1}.
    Rational m_bound = policy.value;
    if (policy.automatic) {
        bool first = true;
        for (const auto& [x, y] : region.top_vertex_pairs()) {
            const Rational mu = dot(v_gamma, y) / dot(u_gamma, x);
            if (first || mu > m_bound) {
                m_bound = mu;
                first = false;
            }
        }
    }

    std::vector<std::size_t> counts;
    std::size_t total = 1;
    std::set<std::pair<int, std::size_t>> seen_coords;
    for (const auto& c : box.coords) {
        if (c.codim < 0 || c.codim > model->dimension())
            throw ValidationError("box coordinate codim out of range");
        if (c.index >= model->rank(c.codim))
            throw ValidationError("box coordinate index out of range in codim " +
                                  std::to_string(c.codim));
        if (!seen_coords.emplace(c.codim, c.index).second)
            throw ValidationError("duplicate box coordinate");
        if (c.step.sign() <= 0)
            throw ValidationError("box step must be positive");
        if (c.min > c.max)
            throw ValidationError("empty candidate box");
        std::size_t steps = 1;
        for (Rational v = c.min + c.step; v <= c.max; v += c.step)
            ++steps;
        counts.push_back(steps);
        total *= steps;
        if (total > 1000000)
            throw ValidationError("candidate box enumerates more than 1000000 classes");
    }

    std::vector<SheafClass> out;
    std::vector<std::size_t> idx(box.coords.size(), 0);
    while (true) {
        auto comps = model->zero_components();
        for (std::size_t k = 0; k < box.coords.size(); ++k) {
            const auto& c = box.coords[k];
            comps[static_cast<std::size_t>(c.codim)][c.index] =
                c.min + Rational(static_cast<long long>(idx[k])) * c.step;
        }
        GradedClass ch(model, std::move(comps));
        const auto nat = SheafClass::natural_dim(ch);
        if (nat) {
            SheafClass f(std::move(ch), *nat);
            const auto u_f = degree_row(f, d);
            const auto v_f = degree_row(f, d - 1);
            bool admissible = false;
            for (const auto& x : region.vertices(d)) {
                const Rational top_f = dot(u_f, x);
                if (top_f.sign() > 0 && top_f < dot(u_gamma, x)) {
                    admissible = true;
                    break;
                }
            }
            if (admissible) {
                bool slope_ok = false;
                for (const auto& [x, y] : region.top_vertex_pairs()) {
                    const Rational den = dot(u_f, x);
                    if (den.sign() <= 0)
                        continue;
                    if (dot(v_f, y) / den <= m_bound) {
                        slope_ok = true;
                        break;
                    }
                }
                if (slope_ok)
                    out.push_back(std::move(f));
            }
        }
        std::size_t k = 0;
        for (; k < idx.size(); ++k) {
            if (++idx[k] < counts[k])
                break;
            idx[k] = 0;
        }
        if (k == idx.size())
            break;
    }
    return out;
}

struct WallSystem {
    int d = 0;
    int r = 0;
    std::vector<Wall> walls;                                 // sorted canonically
    std::vector<std::pair<std::size_t, int>> null_walls;     // (candidate, level)
    std::map<std::size_t, std::vector<int>> provenance;      // candidate -> levels emitted
    bool bilinear = false;
};

namespace detail {

/// Barycentric grid of a polytope: all vertex-weight compositions with
/// total weight `density`.
inline std::vector<std::vector<Rational>> factor_grid(const CompactRegion& region, int codim,
                                                      int density) {
    const auto& vs = region.vertices(codim);
    std::vector<std::vector<Rational>> out;
    std::vector<int> weights(vs.size(), 0);
    const auto emit = [&]() {
        std::vector<Rational> point(region.model()->rank(codim), Rational(0));
        for (std::size_t i = 0; i < vs.size(); ++i) {
            if (weights[i] == 0)
                continue;
            const Rational w{BigInt(weights[i]), BigInt(density)};
            for (std::size_t k = 0; k < point.size(); ++k)
                point[k] += w * vs[i][k];
        }
        out.push_back(std::move(point));
    };
    // Enumerate compositions of `density` into |vs| nonnegative parts.
    std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int remaining) {
        if (pos + 1 == weights.size()) {
            weights[pos] = remaining;
            emit();
            return;
        }
        for (int w = 0; w <= remaining; ++w) {
            weights[pos] = w;
            rec(pos + 1, remaining - w);
        }
    };
    rec(0, density);
    return out;
}

} // namespace detail

/// Assembles the deduplicated wall system.  all-levels emits every level for
/// every candidate; stratified probes K vertices plus a barycentric grid and
/// assigns each candidate the maximal level at which it strictly
/// destabilizes somewhere, emitting only that level's wall.
inline WallSystem wall_system(const SheafClass& gamma, const CompactRegion& region,
                              const std::vector<SheafClass>& candidates, Pruning pruning,
                              int grid_density = 4, CandidateMode mode = CandidateMode::Sub) {
    const int d = region.d();
    const int r = region.r();
    if (gamma.dim != d)
        throw ValidationError("class dimension must equal the region's top degree d");
    WallSystem system;
    system.d = d;
    system.r = r;

    std::vector<std::optional<int>> assigned(candidates.size());
    if (pruning == Pruning::Stratified && !candidates.empty()) {
        if (grid_density < 1)
            throw ValidationError("grid density must be at least 1");
        // Test points: per-factor vertices plus the barycentric grid,
        // combined across factors.
        std::vector<SamplePoint> points{SamplePoint{}};
        for (int j = r; j <= d; ++j) {
            auto factor_points = region.vertices(j);
            for (auto& g : detail::factor_grid(region, j, grid_density))
                factor_points.push_back(std::move(g));
            std::sort(factor_points.begin(), factor_points.end());
            factor_points.erase(std::unique(factor_points.begin(), factor_points.end()),
                                factor_points.end());
            std::vector<SamplePoint> next;
            for (const auto& base : points)
                for (const auto& fp : factor_points) {
                    SamplePoint ext = base;
                    ext[j] = fp;
                    next.push_back(std::move(ext));
                }
            points = std::move(next);
            if (points.size() > 100000)
                throw ValidationError("stratified grid enumerates more than 100000 test points");
        }
        for (const auto& pt : points) {
            const DegreeSystem sys = region.system_at(pt);
            for (int s = d - 1; s >= r; --s) {
                const Verdict v = is_semistable(gamma, sys, candidates, mode, s);
                for (const auto& [idx, cmp] : v.destabilizers)
                    if (cmp == Comparison::Greater)
                        if (!assigned[idx] || *assigned[idx] < s)
                            assigned[idx] = s;
            }
        }
    }

    std::map<std::pair<int, std::vector<std::vector<Rational>>>, std::vector<std::size_t>> dedup;
    for (std::size_t idx = 0; idx < candidates.size(); ++idx) {
        SheafClass f = candidates[idx];
        if (mode == CandidateMode::Quotient) {
            GradedClass sub = gamma.ch - f.ch;
            const auto nat = SheafClass::natural_dim(sub);
            if (!nat) {
                for (int s = r; s < d; ++s)
                    system.null_walls.emplace_back(idx, s);
                continue;
            }
            f = SheafClass(std::move(sub), *nat);
        }
        std::vector<int> levels;
        if (pruning == Pruning::AllLevels) {
            for (int s = r; s < d; ++s)
                levels.push_back(s);
        } else if (assigned[idx]) {
            levels.push_back(*assigned[idx]);
        }
        for (int s : levels) {
            auto w = build_wall(gamma, f, s);
            if (!w) {
                system.null_walls.emplace_back(idx, s);
                continue;
            }
            dedup[{s, w->matrix}].push_back(idx);
            system.provenance[idx].push_back(s);
        }
    }
    for (auto& [key, members] : dedup) {
        Wall w;
        w.level = key.first;
        w.matrix = key.second;
        w.candidates = members;
        system.walls.push_back(std::move(w));
    }
    std::sort(system.walls.begin(), system.walls.end(), [](const Wall& a, const Wall& b) {
        if (a.level != b.level)
            return a.level > b.level;
        return a.matrix < b.matrix;
    });
    if (system.walls.size() > candidates.size() * static_cast<std::size_t>(d - r))
        throw ValidationError("wall count exceeds the finiteness bound");

    // A wall is genuinely bilinear when its mixed term is active across the
    // region: some pair of vertex displacements (dx, dy) has dx^T M dy != 0.
    const auto& xs = region.vertices(d);
    for (const auto& w : system.walls) {
        const auto& ys = region.vertices(w.level);
        bool mixed = false;
        for (std::size_t a = 1; a < xs.size() && !mixed; ++a)
            for (std::size_t b = 1; b < ys.size() && !mixed; ++b) {
                std::vector<Rational> dx(xs[a].size()), dy(ys[b].size());
                for (std::size_t k = 0; k < dx.size(); ++k)
                    dx[k] = xs[a][k] - xs[0][k];
                for (std::size_t k = 0; k < dy.size(); ++k)
                    dy[k] = ys[b][k] - ys[0][k];
                if (!w.evaluate(dx, dy).is_zero())
                    mixed = true;
            }
        if (mixed) {
            system.bilinear = true;
            break;
        }
    }
    return system;
}

/// Exact sign pattern of all wall forms at a parameter point.
inline std::string sign_vector(const SamplePoint& pt, const WallSystem& system) {
    std::string out;
    out.reserve(system.walls.size());
    for (const auto& w : system.walls) {
        const int s = w.evaluate(pt, system.d).sign();
        out.push_back(s > 0 ? '+' : (s < 0 ? '-' : '0'));
    }
    return out;
}

} // namespace sheafstab

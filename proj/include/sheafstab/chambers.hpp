#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "walls.hpp"

namespace sheafstab {

/// Exact real algebraic number a + b*sqrt(disc) with rational a, b and a
/// nonnegative integer discriminant.  Normalized: b = 0 (and disc = 0) for
/// rational values; otherwise disc is not a perfect square and b != 0.
class CrossingParameter {
public:
    static CrossingParameter from_rational(Rational v) {
        CrossingParameter out;
        out.a_ = std::move(v);
        return out;
    }

    static CrossingParameter quadratic(Rational a, Rational b, BigInt disc) {
        if (disc < 0)
            throw ValidationError("negative discriminant");
        CrossingParameter out;
        const BigInt root = boost::multiprecision::sqrt(disc);
        if (b.is_zero() || disc == 0) {
            out.a_ = std::move(a);
        } else if (root * root == disc) {
            out.a_ = a + b * Rational(root);
        } else {
            out.a_ = std::move(a);
            out.b_ = std::move(b);
            out.disc_ = std::move(disc);
        }
        return out;
    }

    bool is_rational() const { return b_.is_zero(); }
    const Rational& rational_part() const { return a_; }
    const Rational& surd_coeff() const { return b_; }
    const BigInt& discriminant() const { return disc_; }

    /// Rational enclosure [lo, hi] with 2^-k resolution on the square root.
    std::pair<Rational, Rational> bounds(unsigned k) const {
        if (is_rational())
            return {a_, a_};
        const BigInt shifted = disc_ << (2 * k);
        const BigInt t = boost::multiprecision::sqrt(shifted);
        const Rational scale(BigInt(1), BigInt(1) << k);
        const Rational lo_root = Rational(t) * scale;
        const Rational hi_root = Rational(BigInt(t + 1)) * scale;
        if (b_.sign() > 0)
            return {a_ + b_ * lo_root, a_ + b_ * hi_root};
        return {a_ + b_ * hi_root, a_ + b_ * lo_root};
    }

    /// Exact three-way comparison.
    int compare(const CrossingParameter& o) const {
        if (is_rational() && o.is_rational())
            return (a_ - o.a_).sign();
        // Rebase into one quadratic field when possible, so that equality
        // and sign become algebraic checks.
        if (!is_rational() && !o.is_rational() && disc_ != o.disc_) {
            const BigInt prod = disc_ * o.disc_;
            const BigInt root = boost::multiprecision::sqrt(prod);
            if (root * root == prod) {
                // sqrt(D2) = (root / D1) * sqrt(D1)
                CrossingParameter rebased;
                rebased.a_ = o.a_;
                rebased.b_ = o.b_ * Rational(root) / Rational(disc_);
                rebased.disc_ = disc_;
                return compare(rebased);
            }
            // Independent surds: values are never equal; refine intervals.
            for (unsigned k = 16; k <= 4096; k *= 2) {
                const auto [lo1, hi1] = bounds(k);
                const auto [lo2, hi2] = o.bounds(k);
                if (hi1 < lo2)
                    return -1;
                if (hi2 < lo1)
                    return 1;
            }
            throw Error("failed to separate two algebraic numbers");
        }
        // Same field (or one side rational): sign of (a1-a2) + (b1-b2) sqrt(D).
        const BigInt disc = is_rational() ? o.disc_ : disc_;
        const Rational da = a_ - o.a_;
        const Rational db = b_ - o.b_;
        if (db.is_zero())
            return da.sign();
        // sign of da + db*sqrt(disc), disc not a perfect square
        if (da.sign() >= 0 && db.sign() > 0)
            return 1;
        if (da.sign() <= 0 && db.sign() < 0)
            return -1;
        const int side = (db.sign() > 0) ? 1 : -1;
        // |da| vs |db| sqrt(disc): compare squares; da and db have opposite signs.
        const Rational lhs = da * da;
        const Rational rhs = db * db * Rational(disc);
        const int mag = (rhs - lhs).sign();
        if (mag == 0)
            return 0; // cannot happen for irrational sqrt; kept for safety
        return mag > 0 ? side : -side;
    }

    friend bool operator<(const CrossingParameter& x, const CrossingParameter& y) {
        return x.compare(y) < 0;
    }
    friend bool operator==(const CrossingParameter& x, const CrossingParameter& y) {
        return x.compare(y) == 0;
    }

    double to_double() const {
        double v = a_.to_double();
        if (!b_.is_zero())
            v += b_.to_double() * std::sqrt(disc_.convert_to<double>());
        return v;
    }

private:
    Rational a_;
    Rational b_;
    BigInt disc_{0};
};

struct ChamberRow {
    std::string sign;
    SamplePoint representative;
};

struct ChamberTable {
    std::vector<ChamberRow> rows;
    std::size_t samples_used = 0;
    std::size_t on_wall_discarded = 0;
};

/// Deterministic chamber sampling: n points with per-sample substreams,
/// on-wall samples discarded, one representative per distinct sign vector,
/// rows sorted by sign vector.
inline ChamberTable sample_chambers(const WallSystem& system, const CompactRegion& region,
                                    int n_samples, std::uint64_t seed) {
    if (n_samples < 1)
        throw ValidationError("sample count must be at least 1");
    ChamberTable table;
    std::map<std::string, SamplePoint> reps;
    for (int i = 0; i < n_samples; ++i) {
        auto rng = detail::Rng::substream(seed, static_cast<std::uint64_t>(i));
        const SamplePoint pt = region.sample_point(rng);
        ++table.samples_used;
        const std::string sv = sign_vector(pt, system);
        if (sv.find('0') != std::string::npos) {
            ++table.on_wall_discarded;
            continue;
        }
        reps.emplace(sv, pt);
    }
    for (auto& [sv, pt] : reps)
        table.rows.push_back({sv, std::move(pt)});
    return table;
}

struct LevelVerdict {
    int level = 0;
    Verdict verdict;
};

/// Semistability verdicts of gamma at every truncation level for the degree
/// system read off a parameter point.
inline std::vector<LevelVerdict> verdicts_at(const SheafClass& gamma, const CompactRegion& region,
                                             const std::vector<SheafClass>& candidates,
                                             CandidateMode mode, const SamplePoint& pt) {
    const DegreeSystem sys = region.system_at(pt);
    std::vector<LevelVerdict> out;
    for (int s = region.d() - 1; s >= region.r(); --s)
        out.push_back({s, is_semistable(gamma, sys, candidates, mode, s)});
    return out;
}

inline bool same_verdicts(const std::vector<LevelVerdict>& a, const std::vector<LevelVerdict>& b) {
    if (a.size() != b.size())
        return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].level != b[i].level || a[i].verdict.status != b[i].verdict.status ||
            a[i].verdict.destabilizers != b[i].verdict.destabilizers ||
            a[i].verdict.skipped != b[i].verdict.skipped)
            return false;
    }
    return true;
}

struct ConstancyReport {
    std::size_t samples_used = 0;
    std::size_t on_wall_discarded = 0;
    std::size_t chambers_seen = 0;
    std::vector<std::string> violations;
    bool pass() const { return violations.empty(); }
};

/// Samples parameter points and checks that every pair with equal sign
/// vector carries identical verdicts at every truncation level.
inline ConstancyReport verdict_constancy_check(const SheafClass& gamma, const WallSystem& system,
                                               const CompactRegion& region,
                                               const std::vector<SheafClass>& candidates,
                                               CandidateMode mode, int n_samples,
                                               std::uint64_t seed) {
    if (n_samples < 1)
        throw ValidationError("sample count must be at least 1");
    ConstancyReport report;
    std::map<std::string, std::pair<SamplePoint, std::vector<LevelVerdict>>> cells;
    for (int i = 0; i < n_samples; ++i) {
        auto rng = detail::Rng::substream(seed, static_cast<std::uint64_t>(i));
        const SamplePoint pt = region.sample_point(rng);
        ++report.samples_used;
        const std::string sv = sign_vector(pt, system);
        if (sv.find('0') != std::string::npos) {
            ++report.on_wall_discarded;
            continue;
        }
        auto verdicts = verdicts_at(gamma, region, candidates, mode, pt);
        const auto it = cells.find(sv);
        if (it == cells.end()) {
            cells.emplace(sv, std::make_pair(pt, std::move(verdicts)));
        } else if (!same_verdicts(it->second.second, verdicts)) {
            report.violations.push_back("sign vector " + sv +
                                        ": two samples disagree on their verdicts");
        }
    }
    report.chambers_seen = cells.size();
    return report;
}

struct CrossingEvent {
    std::size_t wall_id = 0;
    CrossingParameter t;
    std::vector<LevelVerdict> before, after;
};

namespace detail {

/// Interpolated point (1-t) a + t b in every factor.
inline SamplePoint segment_point(const CompactRegion& region, const SamplePoint& a,
                                 const SamplePoint& b, const Rational& t) {
    SamplePoint out;
    const Rational s = Rational(1) - t;
    for (int j = region.r(); j <= region.d(); ++j) {
        std::vector<Rational> coords(a.at(j).size());
        for (std::size_t k = 0; k < coords.size(); ++k)
            coords[k] = s * a.at(j)[k] + t * b.at(j)[k];
        out[j] = std::move(coords);
    }
    return out;
}

/// Roots in the open interval (0, 1) of the wall form restricted to the
/// segment; the restriction is a polynomial of degree at most 2 in t.
inline std::vector<CrossingParameter> segment_roots(const Wall& w, int d, const SamplePoint& a,
                                                    const SamplePoint& b) {
    const auto& xa = a.at(d);
    const auto& ya = a.at(w.level);
    std::vector<Rational> dx(xa.size()), dy(ya.size());
    for (std::size_t k = 0; k < dx.size(); ++k)
        dx[k] = b.at(d)[k] - xa[k];
    for (std::size_t k = 0; k < dy.size(); ++k)
        dy[k] = b.at(w.level)[k] - ya[k];
    const Rational c0 = w.evaluate(xa, ya);
    const Rational c2 = w.evaluate(dx, dy);
    const Rational c1 = w.evaluate(xa, dy) + w.evaluate(dx, ya);

    std::vector<CrossingParameter> roots;
    const CrossingParameter zero = CrossingParameter::from_rational(Rational(0));
    const CrossingParameter one = CrossingParameter::from_rational(Rational(1));
    auto keep = [&](CrossingParameter t) {
        if (zero.compare(t) < 0 && t.compare(one) < 0)
            roots.push_back(std::move(t));
    };
    if (c2.is_zero()) {
        if (!c1.is_zero())
            keep(CrossingParameter::from_rational(-c0 / c1));
        return roots;
    }
    const Rational disc = c1 * c1 - Rational(4) * c0 * c2;
    if (disc.sign() < 0)
        return roots;
    if (disc.sign() == 0) {
        keep(CrossingParameter::from_rational(-c1 / (Rational(2) * c2)));
        return roots;
    }
    // Roots (-c1 +- sqrt(disc)) / (2 c2) with sqrt(p/q) = sqrt(p q) / q.
    const Rational base = -c1 / (Rational(2) * c2);
    const BigInt pq = disc.num() * disc.den();
    const Rational scale = Rational(1) / (Rational(disc.den()) * Rational(2) * c2);
    keep(CrossingParameter::quadratic(base, scale, pq));
    keep(CrossingParameter::quadratic(base, -scale, pq));
    return roots;
}

/// Strict rational lower/upper separators between consecutive parameters,
/// refined until the enclosures are disjoint.
inline Rational separator(const CrossingParameter& lo, const CrossingParameter& hi) {
    for (unsigned k = 16; k <= 4096; k *= 2) {
        const auto [lo_l, lo_h] = lo.bounds(k);
        const auto [hi_l, hi_h] = hi.bounds(k);
        (void)lo_l;
        (void)hi_h;
        if (lo_h < hi_l)
            return (lo_h + hi_l) / Rational(2);
        if (lo.compare(hi) == 0)
            throw Error("cannot separate equal parameters");
    }
    throw Error("failed to separate crossing parameters");
}

} // namespace detail

/// Ordered crossing events along the open segment from a to b, with the
/// full per-level verdicts on both sides of every crossing.  Endpoints must
/// lie in the parameter space and off every wall.
inline std::vector<CrossingEvent> wall_crossing_report(const SheafClass& gamma,
                                                       const CompactRegion& region,
                                                       const WallSystem& system,
                                                       const std::vector<SheafClass>& candidates,
                                                       CandidateMode mode, const SamplePoint& a,
                                                       const SamplePoint& b) {
    region.validate_point(a);
    region.validate_point(b);
    if (sign_vector(a, system).find('0') != std::string::npos ||
        sign_vector(b, system).find('0') != std::string::npos)
        throw ValidationError("segment endpoint lies on a wall");

    std::vector<CrossingEvent> events;
    for (std::size_t w = 0; w < system.walls.size(); ++w)
        for (auto& t : detail::segment_roots(system.walls[w], system.d, a, b))
            events.push_back({w, std::move(t), {}, {}});
    std::sort(events.begin(), events.end(), [](const CrossingEvent& x, const CrossingEvent& y) {
        const int c = x.t.compare(y.t);
        if (c != 0)
            return c < 0;
        return x.wall_id < y.wall_id;
    });
    if (events.empty())
        return events;

    std::vector<const CrossingParameter*> distinct;
    for (const auto& e : events)
        if (distinct.empty() || distinct.back()->compare(e.t) != 0)
            distinct.push_back(&e.t);

    // One representative parameter per open interval between crossings.
    std::vector<Rational> mids;
    mids.push_back(detail::separator(CrossingParameter::from_rational(Rational(0)), *distinct.front()));
    for (std::size_t j = 0; j + 1 < distinct.size(); ++j)
        mids.push_back(detail::separator(*distinct[j], *distinct[j + 1]));
    mids.push_back(detail::separator(*distinct.back(), CrossingParameter::from_rational(Rational(1))));

    std::vector<std::vector<LevelVerdict>> interval_verdicts(mids.size());
    std::vector<bool> computed(mids.size(), false);
    auto verdict_in = [&](std::size_t i) -> const std::vector<LevelVerdict>& {
        if (!computed[i]) {
            const SamplePoint pt = detail::segment_point(region, a, b, mids[i]);
            interval_verdicts[i] = verdicts_at(gamma, region, candidates, mode, pt);
            computed[i] = true;
        }
        return interval_verdicts[i];
    };
    std::size_t j = 0;
    for (auto& e : events) {
        while (distinct[j]->compare(e.t) != 0)
            ++j;
        e.before = verdict_in(j);
        e.after = verdict_in(j + 1);
    }
    return events;
}

} // namespace sheafstab

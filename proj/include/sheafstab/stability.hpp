#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "hilbert.hpp"
#include "numring.hpp"

namespace sheafstab {

/// Tuple of ample classes (alpha_d, ..., alpha_r), alpha_i of codimension i.
/// The window [r, d] is the tracked degree range of all derived polynomials.
class DegreeSystem {
public:
    /// alphas listed by ascending codimension r, r+1, ..., d.
    DegreeSystem(int d, int r, std::vector<GradedClass> alphas) : d_(d), r_(r), alphas_(std::move(alphas)) {
        if (alphas_.empty())
            throw ValidationError("degree system without classes");
        const auto& model = alphas_.front().model();
        const int n = model->dimension();
        if (!(0 <= r_ && r_ < d_ && d_ <= n))
            throw ValidationError("degree system window must satisfy 0 <= r < d <= n");
        if (alphas_.size() != static_cast<std::size_t>(d_ - r_) + 1)
            throw ValidationError("degree system must provide one class per codim in r..d");
        for (int i = r_; i <= d_; ++i) {
            const auto& a = alpha(i);
            alphas_.front().require_same_model(a);
            const auto p = a.pure_codim();
            if (!p || *p != i)
                throw ValidationError("degree system class at position " + std::to_string(i) +
                                      " is not pure of codim " + std::to_string(i));
            if (!cone_test(a, true))
                throw ValidationError("degree system class in codim " + std::to_string(i) +
                                      " is not ample");
        }
    }

    int d() const { return d_; }
    int r() const { return r_; }
    const ModelPtr& model() const { return alphas_.front().model(); }
    const GradedClass& alpha(int codim) const {
        if (codim < r_ || codim > d_)
            throw ValidationError("degree system has no class in codim " + std::to_string(codim));
        return alphas_[static_cast<std::size_t>(codim - r_)];
    }

private:
    int d_, r_;
    std::vector<GradedClass> alphas_;
};

/// P_alpha(gamma, m) = sum over i in [r, d] of deg_{alpha_i}(gamma) m^i / i!.
inline HilbertPoly hilbert_polynomial(const SheafClass& gamma, const DegreeSystem& sys) {
    gamma.ch.require_same_model(sys.alpha(sys.r()));
    if (gamma.dim > sys.d())
        throw ValidationError("class dimension " + std::to_string(gamma.dim) +
                              " exceeds the degree system's top degree " + std::to_string(sys.d()));
    HilbertPoly p(sys.r(), sys.d());
    for (int i = sys.r(); i <= sys.d(); ++i)
        p.slot(i) = degree(gamma, sys.alpha(i)) / factorial(static_cast<unsigned>(i));
    return p;
}

/// p_alpha = P_alpha / deg_{alpha_e} with e the declared dimension.
inline HilbertPoly reduced_hilbert(const SheafClass& gamma, const DegreeSystem& sys) {
    const int e = gamma.dim;
    if (e < sys.r() || e > sys.d())
        throw ValidationError("class dimension " + std::to_string(e) +
                              " lies outside the degree window [" + std::to_string(sys.r()) +
                              ", " + std::to_string(sys.d()) + "]");
    const Rational top = degree(gamma, sys.alpha(e));
    if (top.is_zero())
        throw ValidationError("class has zero degree in its own dimension; no reduced polynomial");
    return hilbert_polynomial(gamma, sys).scaled(Rational(1) / top);
}

enum class RudakovOrder { Precedes, Equivalent, Succeeds, IncomparableZero };

/// Total preorder on nonzero classes: higher polynomial degree precedes;
/// equal degree compares reduced polynomials asymptotically.
inline RudakovOrder rudakov_compare(const SheafClass& g1, const SheafClass& g2, const DegreeSystem& sys) {
    if (g1.is_zero() || g2.is_zero())
        return RudakovOrder::IncomparableZero;
    const HilbertPoly p1 = reduced_hilbert(g1, sys);
    const HilbertPoly p2 = reduced_hilbert(g2, sys);
    if (g1.dim != g2.dim)
        return g1.dim > g2.dim ? RudakovOrder::Precedes : RudakovOrder::Succeeds;
    switch (compare_asymptotic(p1, p2)) {
    case Comparison::Less: return RudakovOrder::Precedes;
    case Comparison::Greater: return RudakovOrder::Succeeds;
    default: return RudakovOrder::Equivalent;
    }
}

enum class StabilityStatus { Stable, Semistable, StrictlySemistable, Unstable, ImpureExcluded };

inline const char* status_string(StabilityStatus s) {
    switch (s) {
    case StabilityStatus::Stable: return "stable";
    case StabilityStatus::Semistable: return "semistable";
    case StabilityStatus::StrictlySemistable: return "strictly-semistable";
    case StabilityStatus::Unstable: return "unstable";
    default: return "impure-excluded";
    }
}

enum class CandidateMode { Sub, Quotient };

/// Outcome of a semistability test against a finite candidate set.  The
/// verdict is relative to that set: purity of the underlying sheaf is not
/// visible in numerical data.  destabilizers holds every candidate whose
/// truncated reduced polynomial weakly exceeds gamma's (Equal or Greater),
/// sorted by candidate index; skipped holds candidates outside the
/// admissibility window 0 < deg_{alpha_d}(F) < deg_{alpha_d}(gamma).
struct Verdict {
    StabilityStatus status = StabilityStatus::Semistable;
    std::vector<std::pair<std::size_t, Comparison>> destabilizers;
    std::vector<std::size_t> skipped;
};

/// Semistability of gamma at truncation level s over the system (alpha_d..alpha_s).
/// In quotient mode each candidate Q is converted to the subobject class gamma - Q.
inline Verdict is_semistable(const SheafClass& gamma, const DegreeSystem& sys,
                             const std::vector<SheafClass>& candidates,
                             CandidateMode mode, int level) {
    const int d = sys.d();
    if (gamma.dim != d)
        throw ValidationError("semistability requires a class of dimension equal to the system's d");
    if (level < sys.r() || level >= d)
        throw ValidationError("truncation level must satisfy r <= s < d");
    const Rational top_gamma = degree(gamma, sys.alpha(d));
    if (top_gamma.sign() <= 0)
        throw ValidationError("class has nonpositive top degree; semistability undefined");
    const HilbertPoly p_gamma = truncate(reduced_hilbert(gamma, sys), level);

    Verdict out;
    bool any_admissible = false, any_equal = false, any_greater = false;
    for (std::size_t idx = 0; idx < candidates.size(); ++idx) {
        gamma.ch.require_same_model(candidates[idx].ch);
        SheafClass f = candidates[idx];
        if (mode == CandidateMode::Quotient) {
            GradedClass sub = gamma.ch - f.ch;
            const auto nat = SheafClass::natural_dim(sub);
            f = SheafClass(std::move(sub), nat ? *nat : d);
        }
        if (f.dim > d) {
            out.skipped.push_back(idx);
            continue;
        }
        const Rational top_f = degree(f, sys.alpha(d));
        if (!(top_f.sign() > 0 && top_f < top_gamma)) {
            out.skipped.push_back(idx);
            continue;
        }
        any_admissible = true;
        const HilbertPoly p_f = truncate(reduced_hilbert(f, sys), level);
        const Comparison cmp = compare_asymptotic(p_f, p_gamma);
        if (cmp == Comparison::Greater) {
            any_greater = true;
            out.destabilizers.emplace_back(idx, cmp);
        } else if (cmp == Comparison::Equal) {
            any_equal = true;
            out.destabilizers.emplace_back(idx, cmp);
        }
    }
    std::sort(out.destabilizers.begin(), out.destabilizers.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    if (any_greater)
        out.status = StabilityStatus::Unstable;
    else if (any_equal)
        out.status = StabilityStatus::StrictlySemistable;
    else if (any_admissible)
        out.status = StabilityStatus::Stable;
    else
        out.status = StabilityStatus::Semistable; // vacuously: nothing to test against
    return out;
}

/// Exact upper-half-plane direction vectors rho_0..rho_n with strictly
/// decreasing phases.  Stored as rational (x_i, y_i), y_i > 0.
class PhaseWeights {
public:
    explicit PhaseWeights(std::vector<std::pair<Rational, Rational>> dirs) : dirs_(std::move(dirs)) {
        if (dirs_.empty())
            throw ValidationError("empty phase weight list");
        for (const auto& [x, y] : dirs_) {
            (void)x;
            if (y.sign() <= 0)
                throw ValidationError("phase weights must lie strictly in the upper half plane");
        }
        for (std::size_t i = 0; i + 1 < dirs_.size(); ++i) {
            // Strict phase decrease: the next direction is strictly clockwise.
            const Rational cross = dirs_[i].first * dirs_[i + 1].second -
                                   dirs_[i].second * dirs_[i + 1].first;
            if (cross.sign() >= 0)
                throw ValidationError("phase weights must have strictly decreasing phases");
        }
    }
    std::size_t size() const { return dirs_.size(); }
    const std::pair<Rational, Rational>& dir(std::size_t i) const { return dirs_.at(i); }

private:
    std::vector<std::pair<Rational, Rational>> dirs_;
};

/// Compares the phase germs of the polynomial stability functions
/// Z(m) = sum_i rho_i deg_{alpha_i}(.) m^i for m >> 0, by the exact sign of
/// the leading coefficient of the cross product of the two plane curves.
inline Comparison bayer_phase_compare(const SheafClass& g1, const SheafClass& g2,
                                      const DegreeSystem& sys, const PhaseWeights& rho) {
    const int n = sys.model()->dimension();
    if (sys.r() != 0 || sys.d() != n)
        throw ValidationError("phase comparison needs a complete degree system (r = 0, d = n)");
    if (rho.size() != static_cast<std::size_t>(n) + 1)
        throw ValidationError("phase weight count must be n + 1");
    if (g1.is_zero() || g2.is_zero())
        throw ValidationError("phase comparison of a zero class");

    auto plane_curve = [&](const SheafClass& g) {
        HilbertPoly x(0, n), y(0, n);
        for (int i = 0; i <= n; ++i) {
            const Rational deg = degree(g, sys.alpha(i));
            x.slot(i) = rho.dir(static_cast<std::size_t>(i)).first * deg;
            y.slot(i) = rho.dir(static_cast<std::size_t>(i)).second * deg;
        }
        return std::make_pair(x, y);
    };
    const auto [x1, y1] = plane_curve(g1);
    const auto [x2, y2] = plane_curve(g2);
    // cross(Z1, Z2) > 0 for m >> 0 means Z2 turns counterclockwise of Z1,
    // i.e. the first germ has the smaller phase.
    const HilbertPoly cross = poly_mul(x1, y2) - poly_mul(y1, x2);
    const auto lead = cross.leading_degree();
    const int s = lead ? cross.at_degree(*lead).sign() : 0;
    return comparison_from_sign(-s);
}

/// deg_{alpha_d}(gamma) P_alpha(F) - P_alpha(gamma) deg_{alpha_d}(F), the
/// relative polynomial whose asymptotic sign tests F against gamma.
inline HilbertPoly moduli_pgamma(const SheafClass& gamma, const SheafClass& f, const DegreeSystem& sys) {
    const Rational top_gamma = degree(gamma, sys.alpha(sys.d()));
    if (top_gamma.sign() <= 0)
        throw ValidationError("reference class has nonpositive top degree");
    const Rational top_f = degree(f, sys.alpha(sys.d()));
    const HilbertPoly pf = hilbert_polynomial(f, sys);
    const HilbertPoly pg = hilbert_polynomial(gamma, sys);
    return pf.scaled(top_gamma) - pg.scaled(top_f);
}

} // namespace sheafstab

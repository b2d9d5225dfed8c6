#pragma once

#include <optional>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace sheafstab {

enum class Comparison { Less, Equal, Greater };

inline Comparison comparison_from_sign(int s) {
    return s < 0 ? Comparison::Less : (s > 0 ? Comparison::Greater : Comparison::Equal);
}

/// Polynomial in one variable m with an explicitly tracked degree window
/// [low, high]; coefficients outside the window are identically zero.
struct HilbertPoly {
    int low = 0;
    int high = 0;
    std::vector<Rational> coeffs; // coeffs[k] belongs to m^(low + k)

    HilbertPoly() : coeffs(1, Rational(0)) {}
    HilbertPoly(int lo, int hi) : low(lo), high(hi) {
        if (lo > hi)
            throw ValidationError("polynomial degree window is inverted");
        coeffs.assign(static_cast<std::size_t>(hi - lo) + 1, Rational(0));
    }

    const Rational& at_degree(int deg) const {
        static const Rational kZero(0);
        if (deg < low || deg > high)
            return kZero;
        return coeffs[static_cast<std::size_t>(deg - low)];
    }
    Rational& slot(int deg) { return coeffs.at(static_cast<std::size_t>(deg - low)); }

    /// Degree of the highest nonzero coefficient; nullopt for the zero polynomial.
    std::optional<int> leading_degree() const {
        for (int deg = high; deg >= low; --deg)
            if (!at_degree(deg).is_zero())
                return deg;
        return std::nullopt;
    }

    bool is_zero() const { return !leading_degree().has_value(); }

    Rational evaluate(const Rational& m) const {
        Rational out(0);
        for (int deg = high; deg >= low; --deg)
            out = out * m + at_degree(deg);
        return out * rational_pow(m, static_cast<unsigned>(low));
    }

    HilbertPoly scaled(const Rational& k) const {
        HilbertPoly out = *this;
        for (auto& c : out.coeffs)
            c *= k;
        return out;
    }

    friend HilbertPoly operator+(const HilbertPoly& a, const HilbertPoly& b) {
        HilbertPoly out(std::min(a.low, b.low), std::max(a.high, b.high));
        for (int deg = out.low; deg <= out.high; ++deg)
            out.slot(deg) = a.at_degree(deg) + b.at_degree(deg);
        return out;
    }
    friend HilbertPoly operator-(const HilbertPoly& a, const HilbertPoly& b) {
        HilbertPoly out(std::min(a.low, b.low), std::max(a.high, b.high));
        for (int deg = out.low; deg <= out.high; ++deg)
            out.slot(deg) = a.at_degree(deg) - b.at_degree(deg);
        return out;
    }
    /// Equality as polynomials (windows may differ).
    friend bool operator==(const HilbertPoly& a, const HilbertPoly& b) {
        const int lo = std::min(a.low, b.low), hi = std::max(a.high, b.high);
        for (int deg = lo; deg <= hi; ++deg)
            if (a.at_degree(deg) != b.at_degree(deg))
                return false;
        return true;
    }
    friend bool operator!=(const HilbertPoly& a, const HilbertPoly& b) { return !(a == b); }
};

/// Sign of p - q for all sufficiently large m: lexicographic comparison of
/// coefficients from the top degree down.
inline Comparison compare_asymptotic(const HilbertPoly& p, const HilbertPoly& q) {
    const int hi = std::max(p.high, q.high);
    const int lo = std::min(p.low, q.low);
    for (int deg = hi; deg >= lo; --deg) {
        const int s = (p.at_degree(deg) - q.at_degree(deg)).sign();
        if (s != 0)
            return comparison_from_sign(s);
    }
    return Comparison::Equal;
}

/// A rational M such that the sign of (p - q)(m) is constant and equal to the
/// asymptotic comparison for every m > M.  (Cauchy-style root bound on p - q.)
inline Rational asymptotic_threshold(const HilbertPoly& p, const HilbertPoly& q) {
    const HilbertPoly diff = p - q;
    const auto lead = diff.leading_degree();
    if (!lead)
        return Rational(0);
    const Rational& top = diff.at_degree(*lead);
    Rational bound(1);
    for (int deg = diff.low; deg < *lead; ++deg)
        bound += (diff.at_degree(deg) / top).abs();
    return bound;
}

inline HilbertPoly poly_mul(const HilbertPoly& a, const HilbertPoly& b) {
    HilbertPoly out(a.low + b.low, a.high + b.high);
    for (int i = a.low; i <= a.high; ++i) {
        if (a.at_degree(i).is_zero())
            continue;
        for (int j = b.low; j <= b.high; ++j)
            out.slot(i + j) += a.at_degree(i) * b.at_degree(j);
    }
    return out;
}

/// Upper truncation: coefficients below degree s are dropped.
inline HilbertPoly truncate(const HilbertPoly& p, int s) {
    if (s < p.low || s > p.high)
        throw ValidationError("truncation degree outside the tracked window");
    HilbertPoly out(s, p.high);
    for (int deg = s; deg <= p.high; ++deg)
        out.slot(deg) = p.at_degree(deg);
    return out;
}

} // namespace sheafstab

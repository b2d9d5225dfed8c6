#pragma once

#include <vector>

#include "../rational.hpp"

namespace sheafstab::detail {

// Truncated power series in one variable, coefficient of x^k at index k.

inline std::vector<Rational> series_mul(const std::vector<Rational>& a,
                                        const std::vector<Rational>& b,
                                        std::size_t order) {
    std::vector<Rational> out(order + 1, Rational(0));
    for (std::size_t i = 0; i < a.size() && i <= order; ++i)
        for (std::size_t j = 0; j < b.size() && i + j <= order; ++j)
            out[i + j] += a[i] * b[j];
    return out;
}

/// Multiplicative inverse of a series with unit constant term.
inline std::vector<Rational> series_inverse(const std::vector<Rational>& a, std::size_t order) {
    if (a.empty() || a[0].is_zero())
        throw ValidationError("series inverse requires a nonzero constant term");
    std::vector<Rational> inv(order + 1, Rational(0));
    inv[0] = Rational(1) / a[0];
    for (std::size_t k = 1; k <= order; ++k) {
        Rational acc(0);
        for (std::size_t i = 1; i <= k; ++i) {
            const Rational ai = i < a.size() ? a[i] : Rational(0);
            acc += ai * inv[k - i];
        }
        inv[k] = -acc / a[0];
    }
    return inv;
}

inline std::vector<Rational> series_pow(const std::vector<Rational>& a,
                                        unsigned e, std::size_t order) {
    std::vector<Rational> out(order + 1, Rational(0));
    out[0] = Rational(1);
    std::vector<Rational> base = a;
    base.resize(order + 1, Rational(0));
    while (e) {
        if (e & 1u)
            out = series_mul(out, base, order);
        base = series_mul(base, base, order);
        e >>= 1u;
    }
    return out;
}

/// x / (1 - e^{-x}) as a series: the inverse of sum_k (-1)^k x^k / (k+1)!.
inline std::vector<Rational> todd_series(std::size_t order) {
    std::vector<Rational> denom(order + 1, Rational(0));
    for (std::size_t k = 0; k <= order; ++k) {
        Rational c = Rational(1) / factorial(static_cast<unsigned>(k + 1));
        denom[k] = (k % 2 == 0) ? c : -c;
    }
    return series_inverse(denom, order);
}

} // namespace sheafstab::detail

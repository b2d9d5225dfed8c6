#pragma once

#include <cstddef>
#include <vector>

#include "../rational.hpp"

namespace sheafstab::detail {

/// One linear constraint: coeffs . x >= rhs.
struct LinearGe {
    std::vector<Rational> coeffs;
    Rational rhs;
};

/// Fourier-Motzkin elimination over the rationals.  Returns true when the
/// system {coeffs_i . x >= rhs_i} has a solution.  Used with rhs = 1 to
/// decide whether a cone given by facet functionals has nonempty interior.
inline bool feasible(std::vector<LinearGe> rows, std::size_t n_vars) {
    for (std::size_t var = 0; var < n_vars; ++var) {
        std::vector<LinearGe> pos, neg, zero;
        for (auto& r : rows) {
            const int s = r.coeffs[var].sign();
            if (s > 0)
                pos.push_back(std::move(r));
            else if (s < 0)
                neg.push_back(std::move(r));
            else
                zero.push_back(std::move(r));
        }
        std::vector<LinearGe> next = std::move(zero);
        for (const auto& p : pos) {
            for (const auto& n : neg) {
                // p scaled by -n[var] plus n scaled by p[var]: coefficient of
                // var cancels and both scales are positive, so >= is kept.
                const Rational sp = -n.coeffs[var];
                const Rational sn = p.coeffs[var];
                LinearGe combined;
                combined.coeffs.resize(n_vars, Rational(0));
                for (std::size_t j = 0; j < n_vars; ++j)
                    combined.coeffs[j] = sp * p.coeffs[j] + sn * n.coeffs[j];
                combined.rhs = sp * p.rhs + sn * n.rhs;
                next.push_back(std::move(combined));
            }
        }
        rows = std::move(next);
    }
    for (const auto& r : rows)
        if (r.rhs.sign() > 0)
            return false;
    return true;
}

} // namespace sheafstab::detail

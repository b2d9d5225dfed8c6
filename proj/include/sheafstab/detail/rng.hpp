#pragma once

#include <cstdint>

#include "../rational.hpp"

namespace sheafstab::detail {

// splitmix64.  The exact output sequence is part of the determinism
// contract, so we spell the generator out instead of relying on the
// standard library distributions (whose mappings are unspecified).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {
        // Warm up so that small seeds decorrelate immediately.
        splitmix64(state_);
        splitmix64(state_);
    }

    /// Independent substream: deterministic function of (seed, index).
    static Rng substream(std::uint64_t seed, std::uint64_t index) {
        std::uint64_t s = seed;
        std::uint64_t h = splitmix64(s) ^ (index * 0xD1B54A32D192ED03ull + 0x8BB84B93962EACC9ull);
        return Rng(h);
    }

    std::uint64_t next() { return splitmix64(state_); }

    /// Uniform-ish value in [0, n), n > 0, via fixed multiply-shift reduction.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next()) * n) >> 64);
    }

    long long int_range(long long lo, long long hi) {
        return lo + static_cast<long long>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    /// Rational with numerator in [-max_num, max_num] and denominator in [1, max_den].
    Rational rational(long long max_num, long long max_den) {
        const long long num = int_range(-max_num, max_num);
        const long long den = int_range(1, max_den);
        return Rational(BigInt(num), BigInt(den));
    }

    /// Strictly positive rational with numerator in [1, max_num].
    Rational positive_rational(long long max_num, long long max_den) {
        const long long num = int_range(1, max_num);
        const long long den = int_range(1, max_den);
        return Rational(BigInt(num), BigInt(den));
    }

private:
    std::uint64_t state_;
};

} // namespace sheafstab::detail

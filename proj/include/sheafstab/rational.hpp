#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace sheafstab {

using BigInt = boost::multiprecision::cpp_int;

/// Arbitrary-precision rational number.  Always stored in canonical form:
/// gcd(num, den) == 1 and den > 0.  All arithmetic is exact; there is no
/// implicit conversion to floating point anywhere in the library.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(int n) : v_(n) {}
    Rational(long long n) : v_(n) {}
    Rational(const BigInt& n) : v_(n) {}
    Rational(const BigInt& num, const BigInt& den) {
        if (den == 0)
            throw ValidationError("rational with zero denominator");
        // cpp_rational rejects negative denominators, so move the sign up.
        if (den < 0)
            v_ = boost::multiprecision::cpp_rational(BigInt(-num), BigInt(-den));
        else
            v_ = boost::multiprecision::cpp_rational(num, den);
    }
    explicit Rational(boost::multiprecision::cpp_rational v) : v_(std::move(v)) {}

    /// Parses "p" or "p/q" where p may carry a leading sign and q is a bare
    /// positive integer.  Whitespace at either end is rejected; so are
    /// decimals, exponents, and signed denominators.
    static Rational parse(std::string_view s) {
        auto bad = [&] {
            return ValidationError("bad rational literal '" + std::string(s) + "'");
        };
        auto parse_int = [&](std::string_view t, bool allow_sign) -> BigInt {
            if (t.empty())
                throw bad();
            std::size_t i = 0;
            bool neg = false;
            if (allow_sign && (t[0] == '-' || t[0] == '+')) {
                neg = t[0] == '-';
                i = 1;
            }
            if (i == t.size())
                throw bad();
            BigInt value = 0;
            for (; i < t.size(); ++i) {
                if (t[i] < '0' || t[i] > '9')
                    throw bad();
                value = value * 10 + (t[i] - '0');
            }
            return neg ? BigInt(-value) : value;
        };
        const auto slash = s.find('/');
        if (slash == std::string_view::npos)
            return Rational(parse_int(s, true));
        const BigInt num = parse_int(s.substr(0, slash), true);
        const BigInt den = parse_int(s.substr(slash + 1), false);
        if (den == 0)
            throw bad();
        return Rational(num, den);
    }

    /// Canonical text form: "p" when the denominator is 1, else "p/q", q > 0.
    std::string str() const {
        const BigInt num = numerator(v_);
        const BigInt den = denominator(v_);
        if (den == 1)
            return num.str();
        return num.str() + "/" + den.str();
    }

    BigInt num() const { return numerator(v_); }
    BigInt den() const { return denominator(v_); }

    bool is_zero() const { return v_ == 0; }
    int sign() const { return v_ == 0 ? 0 : (v_ < 0 ? -1 : 1); }
    bool is_integer() const { return denominator(v_) == 1; }

    Rational abs() const { return v_ < 0 ? Rational(boost::multiprecision::cpp_rational(-v_)) : *this; }

    friend Rational operator+(const Rational& a, const Rational& b) { return Rational(a.v_ + b.v_); }
    friend Rational operator-(const Rational& a, const Rational& b) { return Rational(a.v_ - b.v_); }
    friend Rational operator*(const Rational& a, const Rational& b) { return Rational(a.v_ * b.v_); }
    friend Rational operator/(const Rational& a, const Rational& b) {
        if (b.v_ == 0)
            throw ValidationError("rational division by zero");
        return Rational(a.v_ / b.v_);
    }
    Rational operator-() const { return Rational(boost::multiprecision::cpp_rational(-v_)); }

    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) { *this = *this / o; return *this; }

    friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
    friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
    friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
    friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
    friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
    friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

    /// Lossy; used only when emitting SVG coordinates.
    double to_double() const { return v_.convert_to<double>(); }

    const boost::multiprecision::cpp_rational& raw() const { return v_; }

private:
    boost::multiprecision::cpp_rational v_;
};

inline Rational rational_pow(Rational base, unsigned e) {
    Rational out(1);
    while (e) {
        if (e & 1u)
            out *= base;
        base *= base;
        e >>= 1u;
    }
    return out;
}

/// n! as an exact rational, for power series coefficients.
inline Rational factorial(unsigned n) {
    BigInt f = 1;
    for (unsigned i = 2; i <= n; ++i)
        f *= i;
    return Rational(f);
}

} // namespace sheafstab

#pragma once

#include <cstdint>
#include <numeric>
#include <string>

#include "qidforge/error.hpp"

namespace qidforge {

// Exponent of q on a fractional lattice: the value is num/den with den >= 1
// and gcd(num, den) == 1.  Series exponents like 1/2, 3/4, -n(n+3)/2 all live
// here; arithmetic rescales to the lcm lattice and reduces back, so round
// trips are exact.
struct Exponent {
    std::int64_t num = 0;
    std::int64_t den = 1;

    constexpr Exponent() = default;
    constexpr Exponent(std::int64_t n) : num(n), den(1) {}
    Exponent(std::int64_t n, std::int64_t d) : num(n), den(d) { reduce(); }

    void reduce() {
        if (den == 0) throw Error(Errc::DivisionByZero, "exponent with zero denominator");
        if (den < 0) { num = -num; den = -den; }
        std::int64_t g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) { num /= g; den /= g; }
        if (num == 0) den = 1;
    }

    bool is_integer() const { return den == 1; }
    bool is_zero() const { return num == 0; }

    friend Exponent operator+(Exponent a, Exponent b) {
        std::int64_t l = std::lcm(a.den, b.den);
        return Exponent(a.num * (l / a.den) + b.num * (l / b.den), l);
    }
    friend Exponent operator-(Exponent a, Exponent b) {
        std::int64_t l = std::lcm(a.den, b.den);
        return Exponent(a.num * (l / a.den) - b.num * (l / b.den), l);
    }
    friend Exponent operator*(Exponent a, Exponent b) {
        return Exponent(a.num * b.num, a.den * b.den);
    }
    friend Exponent operator/(Exponent a, Exponent b) {
        if (b.num == 0) throw Error(Errc::DivisionByZero, "division of exponents by zero");
        return Exponent(a.num * b.den, a.den * b.num);
    }
    Exponent operator-() const { Exponent e; e.num = -num; e.den = den; return e; }

    friend bool operator==(const Exponent& a, const Exponent& b) {
        return a.num == b.num && a.den == b.den;
    }
    friend bool operator!=(const Exponent& a, const Exponent& b) { return !(a == b); }
    friend bool operator<(const Exponent& a, const Exponent& b) {
        // den <= limited sizes here; cross multiplication in __int128 is exact
        return static_cast<__int128>(a.num) * b.den < static_cast<__int128>(b.num) * a.den;
    }
    friend bool operator>(const Exponent& a, const Exponent& b) { return b < a; }
    friend bool operator<=(const Exponent& a, const Exponent& b) { return !(b < a); }
    friend bool operator>=(const Exponent& a, const Exponent& b) { return !(a < b); }

    // "3/2" or "-5"; denominator omitted when 1.
    std::string str() const {
        std::string s = std::to_string(num);
        if (den != 1) s += "/" + std::to_string(den);
        return s;
    }
};

} // namespace qidforge

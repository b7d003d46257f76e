#pragma once

#include "qidforge/series.hpp"

namespace qidforge {

// Rational function of q: a quotient of exact Laurent polynomials over the
// integers.  Equality is decided by cross-multiplication, never by reducing
// to a canonical form; the only normalization ever applied is clearing a
// common monomial factor.
struct RationalFunctionQ {
    Series num = Series::zero_exact();
    Series den = Series::one();

    RationalFunctionQ() = default;
    RationalFunctionQ(Series n, Series d);

    static RationalFunctionQ from_int(Int k);
    static RationalFunctionQ from_monomial(Int coeff, Exponent e);
    static RationalFunctionQ from_poly(Series p);

    bool is_zero() const { return num.is_zero(); }

    friend RationalFunctionQ operator+(const RationalFunctionQ& a, const RationalFunctionQ& b);
    friend RationalFunctionQ operator-(const RationalFunctionQ& a, const RationalFunctionQ& b);
    friend RationalFunctionQ operator*(const RationalFunctionQ& a, const RationalFunctionQ& b);
    friend RationalFunctionQ operator/(const RationalFunctionQ& a, const RationalFunctionQ& b);
    RationalFunctionQ operator-() const;
    RationalFunctionQ inverse() const;

    // num1 * den2 == num2 * den1, exactly.
    static bool equal_cross(const RationalFunctionQ& a, const RationalFunctionQ& b);

    // q -> 1/q on numerator and denominator (exponent negation), then clear
    // the common monomial so the denominator has valuation 0.
    RationalFunctionQ substitute_qinv() const;

    // Expansion to order `target`; clears content/monomial from the
    // denominator and fails if what remains is not a unit times a monomial.
    Series to_series(Exponent target) const;

    // As to_series, retrying at higher working order until the result is
    // sound below `target` (negative valuations eat into bounds).
    Series to_series_at_least(Exponent target) const;

    std::string str() const;
};

} // namespace qidforge

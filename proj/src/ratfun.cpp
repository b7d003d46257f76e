#include "qidforge/ratfun.hpp"

#include "qidforge/error.hpp"

namespace qidforge {

RationalFunctionQ::RationalFunctionQ(Series n, Series d) : num(std::move(n)), den(std::move(d)) {
    if (!num.is_exact() || !den.is_exact())
        throw Error(Errc::InvariantViolation, "rational function parts must be exact polynomials");
    if (den.is_zero()) throw Error(Errc::DivisionByZero, "rational function with zero denominator");
}

RationalFunctionQ RationalFunctionQ::from_int(Int k) {
    return RationalFunctionQ(Series::monomial(std::move(k), Exponent(0)), Series::one());
}

RationalFunctionQ RationalFunctionQ::from_monomial(Int coeff, Exponent e) {
    return RationalFunctionQ(Series::monomial(std::move(coeff), e), Series::one());
}

RationalFunctionQ RationalFunctionQ::from_poly(Series p) {
    return RationalFunctionQ(std::move(p), Series::one());
}

RationalFunctionQ operator+(const RationalFunctionQ& a, const RationalFunctionQ& b) {
    return RationalFunctionQ(a.num * b.den + b.num * a.den, a.den * b.den);
}

RationalFunctionQ operator-(const RationalFunctionQ& a, const RationalFunctionQ& b) {
    return RationalFunctionQ(a.num * b.den - b.num * a.den, a.den * b.den);
}

RationalFunctionQ operator*(const RationalFunctionQ& a, const RationalFunctionQ& b) {
    return RationalFunctionQ(a.num * b.num, a.den * b.den);
}

RationalFunctionQ operator/(const RationalFunctionQ& a, const RationalFunctionQ& b) {
    if (b.num.is_zero()) throw Error(Errc::DivisionByZero, "rational function division by zero");
    return RationalFunctionQ(a.num * b.den, a.den * b.num);
}

RationalFunctionQ RationalFunctionQ::operator-() const { return RationalFunctionQ(-num, den); }

RationalFunctionQ RationalFunctionQ::inverse() const {
    if (num.is_zero()) throw Error(Errc::DivisionByZero, "inverse of the zero rational function");
    return RationalFunctionQ(den, num);
}

bool RationalFunctionQ::equal_cross(const RationalFunctionQ& a, const RationalFunctionQ& b) {
    return (a.num * b.den).equal_to(b.num * a.den);
}

namespace {

Series negate_exponents(const Series& p) {
    std::vector<std::pair<Exponent, Int>> ts;
    ts.reserve(p.term_count());
    for (std::size_t i = p.term_count(); i-- > 0;)
        ts.emplace_back(-p.exponent_at(i), p.raw_terms()[i].c);
    return Series::from_terms(ts);
}

} // namespace

RationalFunctionQ RationalFunctionQ::substitute_qinv() const {
    Series n = negate_exponents(num);
    Series d = negate_exponents(den);
    Exponent shift = d.valuation();
    if (!n.is_zero() && n.valuation() < shift) shift = n.valuation();
    if (!shift.is_zero()) {
        n = n.times_monomial(Int(1), -shift);
        d = d.times_monomial(Int(1), -shift);
    }
    return RationalFunctionQ(std::move(n), std::move(d));
}

Series RationalFunctionQ::to_series(Exponent target) const {
    if (num.is_zero()) return Series::zero_exact();
    return Series::divide(num, den, target);
}

Series RationalFunctionQ::to_series_at_least(Exponent target) const {
    Exponent work = target;
    for (int attempt = 0; attempt < 6; ++attempt) {
        Series r = to_series(work);
        auto b = r.bound();
        if (!b || !(*b < target)) return r;
        work = work + (target - *b) + Exponent(1);
    }
    throw Error(Errc::InvariantViolation, "rational function expansion failed to reach order");
}

std::string RationalFunctionQ::str() const {
    return "(" + num.str() + ") / (" + den.str() + ")";
}

} // namespace qidforge

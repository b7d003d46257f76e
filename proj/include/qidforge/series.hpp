#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <gmpxx.h>

#include "qidforge/exponent.hpp"

namespace qidforge {

using Int = mpz_class;

// Truncated Laurent series in q over arbitrary-precision integers.
//
// Exponents live on a per-series lattice: a stored pair (e, c) represents the
// term c * q^(e/den).  Terms are sorted by exponent and never zero.  bound()
// is the exclusive order of validity: all coefficients below it are exact,
// nothing is known at or above it.  A series built from finitely many exact
// factors carries bound() == kExact and is a complete Laurent polynomial.
//
// Every operation computes the tightest sound bound for its result, so a
// reported coefficient is never contaminated by truncation.
class Series {
public:
    struct Term {
        std::int64_t e;
        Int c;
    };
    static constexpr std::int64_t kExact = INT64_MAX;

    Series() = default; // exact zero

    static Series zero(Exponent bound);
    static Series zero_exact() { return Series(); }
    static Series one() { return monomial(Int(1), Exponent(0)); }
    static Series monomial(Int coeff, Exponent e);
    // Ascending list of (exponent, coefficient); zeros are dropped.
    static Series from_terms(const std::vector<std::pair<Exponent, Int>>& ts);

    bool is_zero() const { return terms_.empty(); }
    bool is_exact() const { return bound_ == kExact; }
    std::int64_t lattice_den() const { return den_; }
    std::size_t term_count() const { return terms_.size(); }
    const std::vector<Term>& raw_terms() const { return terms_; }

    // Exclusive order bound; nullopt when the series is exact.
    std::optional<Exponent> bound() const;

    // Least stored exponent; the zero series has none.
    Exponent valuation() const;

    Exponent exponent_at(std::size_t i) const { return Exponent(terms_[i].e, den_); }
    Int coeff(const Exponent& e) const;

    Series operator-() const;
    friend Series operator+(const Series& a, const Series& b);
    friend Series operator-(const Series& a, const Series& b);
    friend Series operator*(const Series& a, const Series& b);

    // s * (1 + c q^e); the workhorse for Pochhammer-style products.
    Series times_binomial(const Int& c, const Exponent& e) const;
    Series times_monomial(const Int& c, const Exponent& e) const;

    // Solves r * (1 + c q^e) = s for r, e != 0; exact below this->bound().
    // Used to peel Pochhammer factors off a running product in O(terms).
    Series divided_by_binomial(const Int& c, const Exponent& e) const;

    bool is_one() const {
        return bound_ == kExact && terms_.size() == 1 && terms_[0].e == 0 && terms_[0].c == 1;
    }

    // Multiplicative inverse to order `target`.  Requires a nonzero series
    // whose lowest coefficient is +1 or -1.
    Series inverted(Exponent target) const;

    // a / b to the soundest computable order (capped at `target`).  Clears
    // integer content and a monomial from b first; fails with
    // NonUnitLeadingCoefficient / NotDivisible when the quotient cannot be an
    // integer series.
    static Series divide(const Series& a, const Series& b, Exponent target);

    // Coefficientwise exact division by a nonzero integer.
    Series div_exact(const Int& k) const;

    // q -> q^k for rational k > 0.
    Series substitute_power(const Exponent& k) const;
    // q -> -q; requires all exponents (and the bound) to be integers.
    Series substitute_neg() const;
    // q^(1/d) -> -q^(1/d): negates coefficients at exponents with odd
    // numerator on the 1/d lattice.  d must be a multiple of the lattice.
    Series substitute_root_neg(std::int64_t d) const;

    Series truncated(Exponent new_bound) const;

    // Spec equality: rescale to the common lattice and compare coefficient
    // maps strictly below min(bound_a, bound_b).
    bool equal_to(const Series& b) const;
    friend bool operator==(const Series& a, const Series& b) { return a.equal_to(b); }

    struct Mismatch {
        Exponent exponent;
        Int lhs, rhs;
    };
    // First exponent below the common bound where the two disagree.
    static std::optional<Mismatch> first_difference(const Series& a, const Series& b);

    // Largest order below which both series are determined (nullopt = everywhere).
    static std::optional<Exponent> common_bound(const Series& a, const Series& b);

    // "1 -q -q^2 +2q^5 +q^7/2": terms ascending, coefficient 1 omitted,
    // exponent shown as num/den with den omitted when 1.
    std::string str() const;

private:
    std::int64_t den_ = 1;
    std::int64_t bound_ = kExact; // scaled by den_
    std::vector<Term> terms_;     // sorted by e, no zero coefficients

    void reduce_lattice();
    void rescale_to(std::int64_t new_den); // new_den must be a multiple of den_
    static std::int64_t common_den(const Series& a, const Series& b);
    static std::int64_t sat_add(std::int64_t a, std::int64_t b);
    void assert_invariants() const;

    friend class SeriesTestAccess;
};

std::int64_t checked_scale(std::int64_t num, std::int64_t factor);

} // namespace qidforge

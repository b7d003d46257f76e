#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qidforge/ratfun.hpp"
#include "qidforge/series.hpp"

namespace qidforge {

// Signed monomial c * q^e.  Parameters of theta functions, Pochhammer
// arguments, and transform specializations all reduce to these.
struct Monomial {
    Int coeff = 1;
    Exponent exp = Exponent(0);

    Monomial() = default;
    Monomial(Int c, Exponent e) : coeff(std::move(c)), exp(e) {
        if (coeff == 0) exp = Exponent(0);
    }
    static Monomial q(Exponent e = Exponent(1)) { return Monomial(Int(1), e); }
    static Monomial zero() { return Monomial(Int(0), Exponent(0)); }
    static Monomial one() { return Monomial(Int(1), Exponent(0)); }

    bool is_zero() const { return coeff == 0; }
    bool is_unit_coeff() const { return coeff == 1 || coeff == -1; }

    friend Monomial operator*(const Monomial& a, const Monomial& b) {
        return Monomial(a.coeff * b.coeff, a.exp + b.exp);
    }
    friend Monomial operator/(const Monomial& a, const Monomial& b);
    Monomial operator-() const { return Monomial(-coeff, exp); }
    Monomial pow_int(std::int64_t k) const;

    friend bool operator==(const Monomial& a, const Monomial& b) {
        return a.coeff == b.coeff && a.exp == b.exp;
    }

    std::string str() const;
    // Parses "-q^(3/2)", "q", "-1", "2", "0".
    static Monomial parse(const std::string& text);
};

// Result of one equality check between two expanded series.
struct Verdict {
    bool matched = false;
    std::optional<Series::Mismatch> first_mismatch;
    Exponent order_used = Exponent(0);
    long long elapsed_ms = 0;
    std::string error; // nonempty when evaluation failed before comparison
    std::string id;

    std::string mismatch_str() const;
};

Verdict compare_series(const Series& lhs, const Series& rhs, Exponent requested);

// ---- Pochhammer symbols ----

// (a; base)_n for integer n (three-case definition: empty product at n = 0,
// reciprocal product for n < 0).  base must be q^s with s > 0.
RationalFunctionQ poch_finite(const Monomial& a, const Monomial& base, std::int64_t n);

// (a; base)_infinity expanded to order N; base = +-q^s with s > 0.
Series poch_inf(const Monomial& a, const Monomial& base, Exponent N);

// ---- Theta functions ----

// f(a,b) via the triple product (-a, -b, ab; ab)_inf.  Requires nonzero
// coefficients and exp(ab) > 0.
Series theta_f(const Monomial& a, const Monomial& b, Exponent N);

// f(a,b) as the bilateral sum; the independent route used for JTP checks.
Series theta_f_sum(const Monomial& a, const Monomial& b, Exponent N);

Series special_phi(const Monomial& x, Exponent N);    // f(x, x)
Series special_psi(const Monomial& x, Exponent N);    // f(x, x^3)
Series special_fminus(const Monomial& x, Exponent N); // f(-x, -x^2)
Series special_chi(const Monomial& x, Exponent N);    // f(-x^2,-x^2) / f(-x,-x^2)

// Quintuple product Q(w,x), product form; w = q^t, t > 0.
Series quintuple_Q(const Monomial& w, const Monomial& x, Exponent N);
// The two-theta sum form f(-wx^3,-w^2/x^3) + x f(-w/x^3,-w^2 x^3).
Series quintuple_Q_sum(const Monomial& w, const Monomial& x, Exponent N);

// False theta Psi(a,b): the theta sum with the negative half negated.
Series false_theta_Psi(const Monomial& a, const Monomial& b, Exponent N);

// Checks f(qz^2, q^3 z^-2) + z f(q^3 z^2, q z^-2) = f(z, q z^-1) to order N.
// Requires z = +-q^r with 0 < r < 1.
Verdict bailey_theta_combination_check(const Monomial& z, Exponent N);

// Expands a product of factors, retrying at higher working order until the
// result is sound to order N (valuation shifts can eat into bounds).
Series product_to(const std::vector<std::function<Series(Exponent)>>& factors, Exponent N);

} // namespace qidforge

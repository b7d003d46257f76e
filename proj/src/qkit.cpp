#include "qidforge/qkit.hpp"

#include <cassert>
#include <chrono>

#include "qidforge/error.hpp"

namespace qidforge {

Monomial operator/(const Monomial& a, const Monomial& b) {
    if (b.coeff == 0) throw Error(Errc::DivisionByZero, "monomial division by zero");
    if (b.coeff != 1 && b.coeff != -1) {
        if (!mpz_divisible_p(a.coeff.get_mpz_t(), b.coeff.get_mpz_t()))
            throw Error(Errc::NotDivisible, "monomial coefficient quotient is not integral");
    }
    return Monomial(a.coeff / b.coeff, a.exp - b.exp);
}

Monomial Monomial::pow_int(std::int64_t k) const {
    if (k == 0) return Monomial::one();
    if (coeff == 0) {
        if (k < 0) throw Error(Errc::DivisionByZero, "negative power of the zero monomial");
        return Monomial::zero();
    }
    if (k < 0 && coeff != 1 && coeff != -1)
        throw Error(Errc::NotDivisible, "negative power of a non-unit monomial");
    Int c = (coeff == -1 && (k % 2 != 0)) ? Int(-1) : Int(1);
    if (coeff != 1 && coeff != -1) {
        mpz_pow_ui(c.get_mpz_t(), coeff.get_mpz_t(), static_cast<unsigned long>(k));
    }
    return Monomial(c, Exponent(exp.num * k, exp.den));
}

std::string Monomial::str() const {
    if (coeff == 0) return "0";
    std::string s;
    Int c = coeff;
    if (c < 0) { s += "-"; c = -c; }
    if (exp.is_zero()) return s + c.get_str();
    if (c != 1) s += c.get_str() + "*";
    s += "q";
    if (!(exp.num == 1 && exp.den == 1)) {
        s += "^";
        if (exp.den != 1) s += "(" + exp.str() + ")";
        else s += exp.str();
    }
    return s;
}

Monomial Monomial::parse(const std::string& text) {
    std::size_t i = 0;
    auto skip = [&] { while (i < text.size() && isspace(static_cast<unsigned char>(text[i]))) ++i; };
    skip();
    Int sign = 1;
    if (i < text.size() && (text[i] == '-' || text[i] == '+')) {
        if (text[i] == '-') sign = -1;
        ++i;
        skip();
    }
    if (i >= text.size()) throw Error(Errc::ParseError, "empty monomial");
    if (isdigit(static_cast<unsigned char>(text[i]))) {
        std::size_t j = i;
        while (j < text.size() && isdigit(static_cast<unsigned char>(text[j]))) ++j;
        Int v(text.substr(i, j - i));
        i = j;
        skip();
        if (i != text.size()) throw Error(Errc::ParseError, "trailing characters in monomial: " + text);
        return Monomial(sign * v, Exponent(0));
    }
    if (text[i] != 'q') throw Error(Errc::ParseError, "bad monomial: " + text);
    ++i;
    Exponent e(1);
    skip();
    if (i < text.size() && text[i] == '^') {
        ++i;
        skip();
        bool paren = i < text.size() && text[i] == '(';
        if (paren) ++i;
        std::int64_t num = 0, den = 1;
        bool negexp = false;
        if (i < text.size() && (text[i] == '-' || text[i] == '+')) { negexp = text[i] == '-'; ++i; }
        std::size_t j = i;
        while (j < text.size() && isdigit(static_cast<unsigned char>(text[j]))) ++j;
        if (j == i) throw Error(Errc::ParseError, "bad exponent in monomial: " + text);
        num = std::stoll(text.substr(i, j - i));
        i = j;
        if (i < text.size() && text[i] == '/') {
            ++i;
            j = i;
            while (j < text.size() && isdigit(static_cast<unsigned char>(text[j]))) ++j;
            if (j == i) throw Error(Errc::ParseError, "bad exponent in monomial: " + text);
            den = std::stoll(text.substr(i, j - i));
            i = j;
        }
        if (paren) {
            if (i >= text.size() || text[i] != ')')
                throw Error(Errc::ParseError, "unbalanced parenthesis in monomial: " + text);
            ++i;
        }
        e = Exponent(negexp ? -num : num, den);
    }
    skip();
    if (i != text.size()) throw Error(Errc::ParseError, "trailing characters in monomial: " + text);
    return Monomial(sign, e);
}

std::string Verdict::mismatch_str() const {
    if (!first_mismatch) return "-";
    return "q^" + first_mismatch->exponent.str() + ":" + first_mismatch->lhs.get_str() + "!=" +
           first_mismatch->rhs.get_str();
}

Verdict compare_series(const Series& lhs, const Series& rhs, Exponent requested) {
    Verdict v;
    auto cb = Series::common_bound(lhs, rhs);
    v.order_used = cb ? std::min(*cb, requested) : requested;
    auto diff = Series::first_difference(lhs.truncated(v.order_used), rhs.truncated(v.order_used));
    v.matched = !diff.has_value();
    v.first_mismatch = diff;
    return v;
}

RationalFunctionQ poch_finite(const Monomial& a, const Monomial& base, std::int64_t n) {
    if (base.coeff != 1 || !(Exponent(0) < base.exp))
        throw Error(Errc::WrongParameter, "finite Pochhammer base must be q^s with s > 0");
    if (n == 0) return RationalFunctionQ::from_int(Int(1));
    if (a.is_zero()) return RationalFunctionQ::from_int(Int(1));
    Series prod = Series::one();
    if (n > 0) {
        for (std::int64_t j = 0; j < n; ++j) {
            Monomial f = a * base.pow_int(j);
            prod = prod.times_binomial(-f.coeff, f.exp);
        }
        return RationalFunctionQ::from_poly(std::move(prod));
    }
    for (std::int64_t j = 1; j <= -n; ++j) {
        Monomial f = a * base.pow_int(-j);
        if (f.coeff == 1 && f.exp.is_zero())
            throw Error(Errc::VanishingFactor,
                        "(" + a.str() + "; " + base.str() + ")_" + std::to_string(n) +
                            " has a vanishing reciprocal factor at j=" + std::to_string(j));
        prod = prod.times_binomial(-f.coeff, f.exp);
    }
    return RationalFunctionQ(Series::one(), std::move(prod));
}

Series poch_inf(const Monomial& a, const Monomial& base, Exponent N) {
    if (!(Exponent(0) < base.exp) || !base.is_unit_coeff())
        throw Error(Errc::NonconvergentBase,
                    "infinite Pochhammer base must be +-q^s with s > 0, got " + base.str());
    if (a.is_zero()) return Series::one().truncated(N);
    Series acc = Series::one();
    for (std::int64_t j = 0;; ++j) {
        Monomial f = a * base.pow_int(j);
        if (Exponent(0) < f.exp) {
            if (acc.is_zero()) return Series::zero_exact();
            Exponent tail_from = f.exp + acc.valuation();
            if (!(tail_from < N)) {
                // remaining factors only touch exponents >= tail_from
                return acc.truncated(tail_from);
            }
        }
        acc = acc.times_binomial(-f.coeff, f.exp);
        if (j > (1 << 22))
            throw Error(Errc::SumDivergence, "infinite Pochhammer did not stabilize");
    }
}

Series product_to(const std::vector<std::function<Series(Exponent)>>& factors, Exponent N) {
    Exponent work = N;
    for (int attempt = 0; attempt < 6; ++attempt) {
        Series acc = Series::one();
        for (const auto& f : factors) acc = acc * f(work);
        auto b = acc.bound();
        if (!b || !(*b < N)) return acc.truncated(N);
        work = work + (N - *b) + Exponent(1);
    }
    throw Error(Errc::InvariantViolation, "product expansion failed to reach requested order");
}

Series theta_f(const Monomial& a, const Monomial& b, Exponent N) {
    if (a.is_zero() || b.is_zero())
        throw Error(Errc::NonconvergentBase, "theta argument with zero coefficient");
    Monomial ab = a * b;
    if (!(Exponent(0) < ab.exp))
        throw Error(Errc::NonconvergentBase,
                    "f(" + a.str() + ", " + b.str() + "): exp(ab) = " + ab.exp.str() + " <= 0");
    return product_to({[&](Exponent W) { return poch_inf(-a, ab, W); },
                       [&](Exponent W) { return poch_inf(-b, ab, W); },
                       [&](Exponent W) { return poch_inf(ab, ab, W); }},
                      N);
}

namespace {

// Triangular exponents n(n+1)/2 and n(n-1)/2 stay nonnegative for all
// integer n, so unit coefficients can be powered by parity alone.
int parity_pow(const Int& c, std::int64_t k) {
    assert(c == 1 || c == -1);
    return (c == -1 && (k % 2 != 0)) ? -1 : 1;
}

} // namespace

Series theta_f_sum(const Monomial& a, const Monomial& b, Exponent N) {
    if (a.is_zero() || b.is_zero())
        throw Error(Errc::NonconvergentBase, "theta argument with zero coefficient");
    if (!a.is_unit_coeff() || !b.is_unit_coeff())
        throw Error(Errc::WrongParameter, "theta sum arguments must have coefficient +-1");
    Monomial ab = a * b;
    if (!(Exponent(0) < ab.exp))
        throw Error(Errc::NonconvergentBase, "theta sum with exp(ab) <= 0");

    std::vector<std::pair<Exponent, Int>> terms;
    auto emit = [&](std::int64_t n) -> bool {
        std::int64_t ta = n * (n + 1) / 2; // exponent multiplier for a
        std::int64_t tb = n * (n - 1) / 2; // exponent multiplier for b
        Exponent e = a.exp * Exponent(ta) + b.exp * Exponent(tb);
        if (!(e < N)) return false;
        int s = parity_pow(a.coeff, ta) * parity_pow(b.coeff, tb);
        terms.emplace_back(e, Int(s));
        return true;
    };
    for (int dir : {+1, -1}) {
        int dead = 0;
        for (std::int64_t k = dir > 0 ? 0 : 1; dead < 3; ++k) {
            if (!emit(dir > 0 ? k : -k)) ++dead; else dead = 0;
            if (k > (1 << 22)) throw Error(Errc::SumDivergence, "theta sum did not terminate");
        }
    }
    // exponents can collide (e.g. f(q,1)); accumulate
    std::sort(terms.begin(), terms.end(),
              [](const auto& p, const auto& q) { return p.first < q.first; });
    std::vector<std::pair<Exponent, Int>> merged;
    for (auto& [e, c] : terms) {
        if (!merged.empty() && merged.back().first == e)
            merged.back().second += c;
        else
            merged.emplace_back(e, std::move(c));
    }
    Series r = Series::from_terms(merged);
    return r.truncated(N);
}

Series special_phi(const Monomial& x, Exponent N) { return theta_f(x, x, N); }

Series special_psi(const Monomial& x, Exponent N) { return theta_f(x, x.pow_int(3), N); }

Series special_fminus(const Monomial& x, Exponent N) {
    return theta_f(-x, -x.pow_int(2), N);
}

Series special_chi(const Monomial& x, Exponent N) {
    Monomial x2 = -x.pow_int(2);
    // denominator has valuation 0, no extra margin needed
    return Series::divide(theta_f(x2, x2, N), special_fminus(x, N), N);
}

Series quintuple_Q(const Monomial& w, const Monomial& x, Exponent N) {
    if (w.coeff != 1 || !(Exponent(0) < w.exp))
        throw Error(Errc::NonconvergentBase, "Q(w,x) requires w = q^t with t > 0");
    if (!x.is_unit_coeff())
        throw Error(Errc::WrongParameter, "Q(w,x) requires x with coefficient +-1");
    Monomial w2 = w.pow_int(2);
    Monomial xinv = x.pow_int(-1);
    return product_to({[&](Exponent W) { return poch_inf(-(w * xinv), w, W); },
                       [&](Exponent W) { return poch_inf(-x, w, W); },
                       [&](Exponent W) { return poch_inf(w, w, W); },
                       [&](Exponent W) { return poch_inf(w * xinv.pow_int(2), w2, W); },
                       [&](Exponent W) { return poch_inf(w * x.pow_int(2), w2, W); }},
                      N);
}

Series quintuple_Q_sum(const Monomial& w, const Monomial& x, Exponent N) {
    Monomial x3 = x.pow_int(3), xm3 = x.pow_int(-3), w2 = w.pow_int(2);
    Series lhs = theta_f_sum(-(w * x3), -(w2 * xm3), N);
    Series rhs = theta_f_sum(-(w * xm3), -(w2 * x3), N - x.exp).times_monomial(x.coeff, x.exp);
    return (lhs + rhs).truncated(N);
}

Series false_theta_Psi(const Monomial& a, const Monomial& b, Exponent N) {
    if (a.is_zero() || b.is_zero())
        throw Error(Errc::NonconvergentBase, "false theta argument with zero coefficient");
    if (!a.is_unit_coeff() || !b.is_unit_coeff())
        throw Error(Errc::WrongParameter, "false theta arguments must have coefficient +-1");
    if (!(Exponent(0) < a.exp + b.exp))
        throw Error(Errc::NonconvergentBase, "false theta with exp(ab) <= 0");

    std::vector<std::pair<Exponent, Int>> terms;
    auto emit = [&](std::int64_t ta, std::int64_t tb, int outer_sign) -> bool {
        Exponent e = a.exp * Exponent(ta) + b.exp * Exponent(tb);
        if (!(e < N)) return false;
        int s = outer_sign * parity_pow(a.coeff, ta) * parity_pow(b.coeff, tb);
        terms.emplace_back(e, Int(s));
        return true;
    };
    int dead = 0;
    for (std::int64_t n = 0; dead < 3; ++n) {
        if (!emit(n * (n + 1) / 2, n * (n - 1) / 2, +1)) ++dead; else dead = 0;
        if (n > (1 << 22)) throw Error(Errc::SumDivergence, "false theta did not terminate");
    }
    dead = 0;
    for (std::int64_t n = 1; dead < 3; ++n) {
        if (!emit(n * (n - 1) / 2, n * (n + 1) / 2, -1)) ++dead; else dead = 0;
        if (n > (1 << 22)) throw Error(Errc::SumDivergence, "false theta did not terminate");
    }
    std::sort(terms.begin(), terms.end(),
              [](const auto& p, const auto& q) { return p.first < q.first; });
    std::vector<std::pair<Exponent, Int>> merged;
    for (auto& [e, c] : terms) {
        if (!merged.empty() && merged.back().first == e)
            merged.back().second += c;
        else
            merged.emplace_back(e, std::move(c));
    }
    Series r = Series::from_terms(merged);
    return r.truncated(N);
}

Verdict bailey_theta_combination_check(const Monomial& z, Exponent N) {
    if (!z.is_unit_coeff() || !(Exponent(0) < z.exp) || !(z.exp < Exponent(1)))
        throw Error(Errc::NonconvergentBase,
                    "Bailey theta combination requires z = +-q^r with 0 < r < 1, got " + z.str());
    auto t0 = std::chrono::steady_clock::now();
    Monomial q1 = Monomial::q(Exponent(1)), q3 = Monomial::q(Exponent(3));
    Monomial z2 = z.pow_int(2), zm2 = z.pow_int(-2);
    Series lhs = theta_f(q1 * z2, q3 * zm2, N) +
                 theta_f(q3 * z2, q1 * zm2, N - z.exp).times_monomial(z.coeff, z.exp);
    Series rhs = theta_f(z, q1 / z, N);
    Verdict v = compare_series(lhs.truncated(N), rhs.truncated(N), N);
    v.elapsed_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
    return v;
}

} // namespace qidforge

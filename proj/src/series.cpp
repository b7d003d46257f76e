#include "qidforge/series.hpp"

#include <algorithm>
#include <cassert>
#include <sstream>

#include "qidforge/error.hpp"

namespace qidforge {

std::int64_t checked_scale(std::int64_t num, std::int64_t factor) {
    __int128 v = static_cast<__int128>(num) * factor;
    if (v > INT64_MAX - 1 || v < INT64_MIN + 1)
        throw Error(Errc::InvariantViolation, "exponent overflow during lattice rescale");
    return static_cast<std::int64_t>(v);
}

std::int64_t Series::sat_add(std::int64_t a, std::int64_t b) {
    if (a == kExact || b == kExact) return kExact;
    __int128 v = static_cast<__int128>(a) + b;
    if (v >= kExact) return kExact - 1;
    if (v < INT64_MIN + 1) throw Error(Errc::InvariantViolation, "order bound underflow");
    return static_cast<std::int64_t>(v);
}

Series Series::zero(Exponent b) {
    Series s;
    s.den_ = b.den;
    s.bound_ = b.num;
    s.reduce_lattice();
    return s;
}

Series Series::monomial(Int coeff, Exponent e) {
    Series s;
    if (coeff == 0) return s;
    s.den_ = e.den;
    s.terms_.push_back({e.num, std::move(coeff)});
    return s;
}

Series Series::from_terms(const std::vector<std::pair<Exponent, Int>>& ts) {
    Series s;
    for (const auto& [e, c] : ts) {
        if (c == 0) continue;
        std::int64_t l = std::lcm(s.den_, e.den);
        s.rescale_to(l);
        s.terms_.push_back({checked_scale(e.num, l / e.den), c});
    }
    std::sort(s.terms_.begin(), s.terms_.end(),
              [](const Term& a, const Term& b) { return a.e < b.e; });
    for (std::size_t i = 1; i < s.terms_.size(); ++i)
        if (s.terms_[i].e == s.terms_[i - 1].e)
            throw Error(Errc::InvariantViolation, "duplicate exponent in from_terms");
    s.reduce_lattice();
    return s;
}

std::optional<Exponent> Series::bound() const {
    if (bound_ == kExact) return std::nullopt;
    return Exponent(bound_, den_);
}

Exponent Series::valuation() const {
    if (terms_.empty()) throw Error(Errc::ZeroSeries, "valuation of the zero series");
    return Exponent(terms_.front().e, den_);
}

Int Series::coeff(const Exponent& e) const {
    if (e.den != 0 && den_ % e.den == 0) {
        std::int64_t key = e.num * (den_ / e.den);
        auto it = std::lower_bound(terms_.begin(), terms_.end(), key,
                                   [](const Term& t, std::int64_t k) { return t.e < k; });
        if (it != terms_.end() && it->e == key) return it->c;
    }
    return Int(0);
}

void Series::rescale_to(std::int64_t new_den) {
    if (new_den == den_) return;
    assert(new_den % den_ == 0);
    std::int64_t f = new_den / den_;
    for (auto& t : terms_) t.e = checked_scale(t.e, f);
    if (bound_ != kExact) bound_ = checked_scale(bound_, f);
    den_ = new_den;
}

void Series::reduce_lattice() {
    if (den_ == 1) return;
    std::int64_t g = den_;
    if (bound_ != kExact) g = std::gcd(g, bound_ < 0 ? -bound_ : bound_);
    for (const auto& t : terms_) {
        if (g == 1) return;
        g = std::gcd(g, t.e < 0 ? -t.e : t.e);
    }
    if (g <= 1) return;
    for (auto& t : terms_) t.e /= g;
    if (bound_ != kExact) bound_ /= g;
    den_ /= g;
}

std::int64_t Series::common_den(const Series& a, const Series& b) {
    return std::lcm(a.den_, b.den_);
}

Series Series::operator-() const {
    Series r = *this;
    for (auto& t : r.terms_) t.c = -t.c;
    return r;
}

Series operator+(const Series& a, const Series& b) {
    Series x = a, y = b;
    std::int64_t l = Series::common_den(a, b);
    x.rescale_to(l);
    y.rescale_to(l);
    Series r;
    r.den_ = l;
    r.bound_ = std::min(x.bound_, y.bound_);
    r.terms_.reserve(x.terms_.size() + y.terms_.size());
    std::size_t i = 0, j = 0;
    while (i < x.terms_.size() || j < y.terms_.size()) {
        std::int64_t e;
        Int c;
        if (j >= y.terms_.size() || (i < x.terms_.size() && x.terms_[i].e < y.terms_[j].e)) {
            e = x.terms_[i].e;
            c = std::move(x.terms_[i].c);
            ++i;
        } else if (i >= x.terms_.size() || y.terms_[j].e < x.terms_[i].e) {
            e = y.terms_[j].e;
            c = std::move(y.terms_[j].c);
            ++j;
        } else {
            e = x.terms_[i].e;
            c = x.terms_[i].c + y.terms_[j].c;
            ++i, ++j;
        }
        if (e >= r.bound_) break;
        if (c != 0) r.terms_.push_back({e, std::move(c)});
    }
    r.reduce_lattice();
    return r;
}

Series operator-(const Series& a, const Series& b) { return a + (-b); }

Series operator*(const Series& a, const Series& b) {
    std::int64_t l = Series::common_den(a, b);
    Series x = a, y = b;
    x.rescale_to(l);
    y.rescale_to(l);

    // Sound bound: the unknown tail of a truncated operand, multiplied by the
    // other operand's lowest term, first pollutes N_i + val(other).
    std::int64_t bound = Series::kExact;
    if (x.bound_ != Series::kExact)
        bound = std::min(bound, Series::sat_add(x.bound_, y.terms_.empty() ? Series::kExact
                                                                           : y.terms_.front().e));
    if (y.bound_ != Series::kExact)
        bound = std::min(bound, Series::sat_add(y.bound_, x.terms_.empty() ? Series::kExact
                                                                           : x.terms_.front().e));

    Series r;
    r.den_ = l;
    r.bound_ = bound;
    if (x.terms_.empty() || y.terms_.empty()) {
        r.reduce_lattice();
        return r;
    }
    if (x.terms_.size() > y.terms_.size()) std::swap(x, y);

    std::int64_t base = x.terms_.front().e + y.terms_.front().e;
    std::int64_t top = bound;
    if (bound == Series::kExact) top = x.terms_.back().e + y.terms_.back().e + 1;
    std::int64_t size = top - base;
    if (size <= 0) {
        r.reduce_lattice();
        return r;
    }

    if (size <= (1 << 22)) {
        // dense accumulation over the scaled exponent range
        std::vector<Int> acc(static_cast<std::size_t>(size));
        for (const auto& tx : x.terms_) {
            for (const auto& ty : y.terms_) {
                std::int64_t e = tx.e + ty.e;
                if (e >= top) break;
                acc[static_cast<std::size_t>(e - base)] += tx.c * ty.c;
            }
        }
        for (std::int64_t k = 0; k < size; ++k)
            if (acc[static_cast<std::size_t>(k)] != 0)
                r.terms_.push_back({base + k, std::move(acc[static_cast<std::size_t>(k)])});
    } else {
        // sparse fallback: rarely hit (enormous exact products)
        std::vector<std::pair<std::int64_t, Int>> all;
        for (const auto& tx : x.terms_)
            for (const auto& ty : y.terms_) {
                std::int64_t e = tx.e + ty.e;
                if (e >= top) break;
                all.emplace_back(e, tx.c * ty.c);
            }
        std::sort(all.begin(), all.end(),
                  [](const auto& p, const auto& q) { return p.first < q.first; });
        for (auto& [e, c] : all) {
            if (!r.terms_.empty() && r.terms_.back().e == e)
                r.terms_.back().c += c;
            else
                r.terms_.push_back({e, std::move(c)});
        }
        r.terms_.erase(std::remove_if(r.terms_.begin(), r.terms_.end(),
                                      [](const Series::Term& t) { return t.c == 0; }),
                       r.terms_.end());
    }
    r.reduce_lattice();
    return r;
}

Series Series::times_binomial(const Int& c, const Exponent& e) const {
    if (c == 0) return *this;
    std::int64_t l = std::lcm(den_, e.den);
    Series x = *this;
    x.rescale_to(l);
    std::int64_t se = checked_scale(e.num, l / e.den);

    Series r;
    r.den_ = l;
    r.bound_ = x.bound_;
    if (x.bound_ != kExact && se < 0) r.bound_ = sat_add(x.bound_, se);
    r.terms_.reserve(x.terms_.size() * 2);
    std::size_t i = 0, j = 0; // i: identity copy, j: shifted copy
    while (i < x.terms_.size() || j < x.terms_.size()) {
        std::int64_t ei = i < x.terms_.size() ? x.terms_[i].e : kExact;
        std::int64_t ej = j < x.terms_.size() ? sat_add(x.terms_[j].e, se) : kExact;
        std::int64_t emin = std::min(ei, ej);
        if (emin >= r.bound_) break;
        Int v(0);
        if (ei == emin) { v += x.terms_[i].c; ++i; }
        if (ej == emin) { v += c * x.terms_[j].c; ++j; }
        if (v != 0) r.terms_.push_back({emin, std::move(v)});
    }
    r.reduce_lattice();
    return r;
}

Series Series::times_monomial(const Int& c, const Exponent& e) const {
    if (c == 0) return Series(); // multiplying by an exact zero monomial

    std::int64_t l = std::lcm(den_, e.den);
    Series r = *this;
    r.rescale_to(l);
    std::int64_t se = checked_scale(e.num, l / e.den);
    for (auto& t : r.terms_) {
        t.e = sat_add(t.e, se);
        t.c *= c;
    }
    if (r.bound_ != kExact) r.bound_ = sat_add(r.bound_, se);
    r.reduce_lattice();
    return r;
}

Series Series::divided_by_binomial(const Int& c, const Exponent& e) const {
    if (e.is_zero())
        throw Error(Errc::InvariantViolation, "divided_by_binomial needs a nonzero exponent");
    if (c == 0) return *this;
    if (e.num < 0) {
        // (1 + c q^e) = c q^e (1 + c q^-e) for unit c
        if (c != 1 && c != -1)
            throw Error(Errc::NonUnitLeadingCoefficient,
                        "dividing by a binomial with non-unit leading coefficient");
        return times_monomial(c, -e).divided_by_binomial(c, -e);
    }
    if (terms_.empty()) return *this;
    std::int64_t l = std::lcm(den_, e.den);
    Series x = *this;
    x.rescale_to(l);
    std::int64_t se = checked_scale(e.num, l / e.den);
    if (x.bound_ == kExact)
        throw Error(Errc::InvariantViolation,
                    "divided_by_binomial needs a truncated operand (infinite result)");

    std::int64_t v = x.terms_.front().e;
    std::int64_t size = x.bound_ - v;
    if (size <= 0) return x;
    std::vector<Int> r(static_cast<std::size_t>(size));
    for (const auto& t : x.terms_) r[static_cast<std::size_t>(t.e - v)] = t.c;
    // r_k := s_k - c r_{k-e}, ascending
    for (std::int64_t k = se; k < size; ++k) {
        const Int& prev = r[static_cast<std::size_t>(k - se)];
        if (prev != 0) r[static_cast<std::size_t>(k)] -= c * prev;
    }
    Series out;
    out.den_ = l;
    out.bound_ = x.bound_;
    for (std::int64_t k = 0; k < size; ++k)
        if (r[static_cast<std::size_t>(k)] != 0)
            out.terms_.push_back({v + k, std::move(r[static_cast<std::size_t>(k)])});
    out.reduce_lattice();
    return out;
}

Series Series::inverted(Exponent target) const {
    if (terms_.empty()) throw Error(Errc::ZeroSeries, "inverse of the zero series");
    const Int& lead = terms_.front().c;
    if (lead != 1 && lead != -1)
        throw Error(Errc::NonUnitLeadingCoefficient,
                    "leading coefficient " + lead.get_str() + " at exponent " +
                        valuation().str());

    std::int64_t l = std::lcm(den_, target.den);
    Series x = *this;
    x.rescale_to(l);
    std::int64_t starget = target.num == kExact ? kExact : checked_scale(target.num, l / target.den);

    std::int64_t v = x.terms_.front().e;
    // u = +-q^-v * this = 1 + sum a_j q^j; 1/u known below bound(this) - v
    std::int64_t ubound = x.bound_ == kExact ? kExact : sat_add(x.bound_, -v);
    std::int64_t rbound = std::min(starget == kExact ? kExact : sat_add(starget, v), ubound);
    if (rbound == kExact)
        throw Error(Errc::InvariantViolation, "inverse of an exact series needs a finite target");

    bool neg = lead == -1;
    std::int64_t size = rbound; // w has exponents [0, rbound)
    Series r;
    r.den_ = l;
    r.bound_ = sat_add(rbound, -v);
    if (size <= 0) { r.reduce_lattice(); return r; }

    std::vector<Int> w(static_cast<std::size_t>(size));
    w[0] = 1;
    // w_k = -sum_{j>=1} a_j w_{k-j}, iterating over the sparse a
    for (std::int64_t k = 1; k < size; ++k) {
        Int acc(0);
        for (std::size_t ti = 1; ti < x.terms_.size(); ++ti) {
            std::int64_t j = x.terms_[ti].e - v;
            if (j > k) break;
            Int a = neg ? Int(-x.terms_[ti].c) : x.terms_[ti].c;
            acc -= a * w[static_cast<std::size_t>(k - j)];
        }
        w[static_cast<std::size_t>(k)] = std::move(acc);
    }
    for (std::int64_t k = 0; k < size; ++k) {
        Int c = neg ? Int(-w[static_cast<std::size_t>(k)]) : w[static_cast<std::size_t>(k)];
        if (c != 0) r.terms_.push_back({k - v, std::move(c)});
    }
    r.reduce_lattice();
    return r;
}

Series Series::divide(const Series& a, const Series& b, Exponent target) {
    if (b.terms_.empty()) throw Error(Errc::ZeroSeries, "division by the zero series");
    const Int& lead = b.terms_.front().c;
    Int g = abs(lead);
    if (g != 1) {
        for (const auto& t : b.terms_) {
            g = gcd(g, t.c);
            if (g == 1) break;
        }
        if (abs(lead) != g)
            throw Error(Errc::NonUnitLeadingCoefficient,
                        "divisor leading coefficient " + lead.get_str() +
                            " is not a unit times the content");
    }
    if (g == 1) return a * b.inverted(target);
    return a.div_exact(g) * b.div_exact(g).inverted(target);
}

Series Series::div_exact(const Int& k) const {
    if (k == 0) throw Error(Errc::DivisionByZero, "div_exact by zero");
    Series r = *this;
    for (auto& t : r.terms_) {
        if (!mpz_divisible_p(t.c.get_mpz_t(), k.get_mpz_t()))
            throw Error(Errc::NotDivisible, "coefficient " + t.c.get_str() + " at exponent " +
                                                Exponent(t.e, r.den_).str() +
                                                " not divisible by " + k.get_str());
        t.c /= k;
    }
    return r;
}

Series Series::substitute_power(const Exponent& k) const {
    if (k.num <= 0) throw Error(Errc::WrongParameter, "substitute_power needs k > 0");
    Series r = *this;
    std::int64_t new_den = checked_scale(r.den_, k.den);
    for (auto& t : r.terms_) t.e = checked_scale(t.e, k.num);
    if (r.bound_ != kExact) r.bound_ = checked_scale(r.bound_, k.num);
    r.den_ = new_den;
    r.reduce_lattice();
    return r;
}

Series Series::substitute_neg() const {
    Series r = *this;
    for (auto& t : r.terms_) {
        if (t.e % r.den_ != 0)
            throw Error(Errc::InvariantViolation,
                        "q -> -q on a fractional exponent " + Exponent(t.e, r.den_).str());
        if (((t.e / r.den_) % 2 + 2) % 2 == 1) t.c = -t.c;
    }
    return r;
}

Series Series::substitute_root_neg(std::int64_t d) const {
    Series r = *this;
    if (d % r.den_ != 0)
        throw Error(Errc::InvariantViolation,
                    "root substitution lattice " + std::to_string(d) +
                        " incompatible with series lattice " + std::to_string(r.den_));
    std::int64_t f = d / r.den_;
    for (auto& t : r.terms_) {
        std::int64_t m = t.e * f;
        if (((m % 2) + 2) % 2 == 1) t.c = -t.c;
    }
    return r;
}

Series Series::truncated(Exponent new_bound) const {
    if (new_bound.num == kExact) return *this;
    std::int64_t l = std::lcm(den_, new_bound.den);
    Series r = *this;
    r.rescale_to(l);
    std::int64_t nb = checked_scale(new_bound.num, l / new_bound.den);
    if (nb < r.bound_) {
        r.bound_ = nb;
        while (!r.terms_.empty() && r.terms_.back().e >= nb) r.terms_.pop_back();
    }
    r.reduce_lattice();
    return r;
}

std::optional<Exponent> Series::common_bound(const Series& a, const Series& b) {
    if (a.bound_ == kExact && b.bound_ == kExact) return std::nullopt;
    if (a.bound_ == kExact) return b.bound();
    if (b.bound_ == kExact) return a.bound();
    return std::min(Exponent(a.bound_, a.den_), Exponent(b.bound_, b.den_));
}

bool Series::equal_to(const Series& b) const {
    return !first_difference(*this, b).has_value();
}

std::optional<Series::Mismatch> Series::first_difference(const Series& a, const Series& b) {
    std::int64_t l = common_den(a, b);
    Series x = a, y = b;
    x.rescale_to(l);
    y.rescale_to(l);
    std::int64_t limit = std::min(x.bound_, y.bound_);
    std::size_t i = 0, j = 0;
    while (i < x.terms_.size() || j < y.terms_.size()) {
        std::int64_t ei = i < x.terms_.size() ? x.terms_[i].e : kExact;
        std::int64_t ej = j < y.terms_.size() ? y.terms_[j].e : kExact;
        std::int64_t e = std::min(ei, ej);
        if (e >= limit) break;
        Int ca = ei == e ? x.terms_[i++].c : Int(0);
        Int cb = ej == e ? y.terms_[j++].c : Int(0);
        if (ca != cb) return Mismatch{Exponent(e, l), std::move(ca), std::move(cb)};
    }
    return std::nullopt;
}

std::string Series::str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& t : terms_) {
        Int c = t.c;
        bool negc = c < 0;
        if (negc) c = -c;
        if (first) {
            if (negc) os << "-";
            first = false;
        } else {
            os << (negc ? " -" : " +");
        }
        Exponent e(t.e, den_);
        if (e.is_zero()) {
            os << c.get_str();
        } else {
            if (c != 1) os << c.get_str();
            os << "q";
            if (!(e.num == 1 && e.den == 1)) os << "^" << e.str();
        }
    }
    return os.str();
}

void Series::assert_invariants() const {
    assert(den_ >= 1);
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        assert(terms_[i].c != 0);
        assert(terms_[i].e < bound_);
        if (i) assert(terms_[i - 1].e < terms_[i].e);
    }
}

} // namespace qidforge

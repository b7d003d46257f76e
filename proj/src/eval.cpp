#include "qidforge/eval.hpp"

#include <cmath>
#include <map>

#include "qidforge/error.hpp"

namespace qidforge {

namespace {

Int pow_scalar(const Int& c, const Exponent& p_exp) {
    if (!p_exp.is_integer())
        throw Error(Errc::WrongParameter, "non-integer power of a signed base");
    std::int64_t p = p_exp.num;
    if (c == 1) return Int(1);
    if (c == -1) return Int((p % 2 + 2) % 2 == 0 ? 1 : -1);
    if (c == 0) {
        if (p < 0) throw Error(Errc::DivisionByZero, "negative power of zero");
        return Int(p == 0 ? 1 : 0);
    }
    if (p < 0) throw Error(Errc::NotDivisible, "negative power of a non-unit base");
    Int r;
    mpz_pow_ui(r.get_mpz_t(), c.get_mpz_t(), static_cast<unsigned long>(p));
    return r;
}

std::int64_t checked_int_len(const Exponent& e, const char* what) {
    if (!e.is_integer()) throw Error(Errc::WrongParameter, std::string(what) + " is not an integer");
    return e.num;
}

// numerator/denominator pair, divided only at term or top-level boundaries
struct SVal {
    Series num = Series::zero_exact();
    Series den = Series::one();
};

struct Ctx {
    Exponent W;
    std::optional<std::int64_t> n;
    const EvalContext* ext = nullptr;
};

// a / b as (series, integer denominator): integer content of b that cannot
// be cleared against a is returned separately, so summands that are only
// integral in aggregate (e.g. a (-1;q^2)_{n+1} factor) stay exact.
std::pair<Series, Int> divide_rational(const Series& a, const Series& b, Exponent target) {
    if (b.is_zero()) throw Error(Errc::ZeroSeries, "division by the zero series");
    const Int& lead = b.raw_terms().front().c;
    Int g = abs(lead);
    if (g != 1) {
        for (const auto& t : b.raw_terms()) {
            g = gcd(g, t.c);
            if (g == 1) break;
        }
        if (abs(lead) != g)
            throw Error(Errc::NonUnitLeadingCoefficient,
                        "divisor leading coefficient " + lead.get_str() +
                            " is not a unit times the content");
    }
    if (g == 1) return {a * b.inverted(target), Int(1)};
    return {a * b.div_exact(g).inverted(target), g};
}

Series poch_inf_product(const Poch& p, const Ctx& c);
SVal eval_node(const ExprPtr& e, const Ctx& c);

Monomial sarg_at(const SArg& a, const std::optional<std::int64_t>& n) {
    Exponent e = a.exp.is_constant()
                     ? a.exp.C
                     : (n ? a.exp.eval(*n)
                          : throw Error(Errc::WrongParameter, "free variable in argument"));
    return Monomial(a.coeff, e);
}

Exponent quad_at(const QuadExp& p, const std::optional<std::int64_t>& n) {
    if (p.is_constant()) return p.C;
    if (!n) throw Error(Errc::WrongParameter, "free variable in exponent");
    return p.eval(*n);
}

Series theta_atom(const Theta& t, Exponent W) {
    switch (t.kind) {
    case ThetaKind::F: return theta_f(t.a, *t.b, W);
    case ThetaKind::QuintQ: return quintuple_Q(t.a, *t.b, W);
    case ThetaKind::FalsePsi: return false_theta_Psi(t.a, *t.b, W);
    case ThetaKind::Phi: return special_phi(t.a, W);
    case ThetaKind::Psi: return special_psi(t.a, W);
    case ThetaKind::Fneg: return special_fminus(t.a, W);
    case ThetaKind::Chi: return special_chi(t.a, W);
    }
    throw Error(Errc::InvariantViolation, "bad theta kind");
}

Series poch_inf_product(const Poch& p, const Ctx& c) {
    Series acc = Series::one().truncated(c.W);
    Monomial base = Monomial::q(p.base);
    for (const auto& a : p.args) {
        Monomial m = sarg_at(a, c.n);
        acc = acc * poch_inf(m, base, c.W);
    }
    return acc;
}

// finite Pochhammer product as a series pair (handles negative lengths)
SVal poch_finite_pair(const Poch& p, const Ctx& c) {
    std::int64_t L = checked_int_len(quad_at(*p.len, c.n), "Pochhammer length");
    Monomial base = Monomial::q(p.base);
    SVal r;
    r.num = Series::one();
    for (const auto& a : p.args) {
        Monomial m = sarg_at(a, c.n);
        RationalFunctionQ rf = poch_finite(m, base, L);
        r.num = r.num * rf.num;
        r.den = r.den * rf.den;
    }
    return r;
}

// ---- fast summation path ------------------------------------------------
//
// Most summands are a monomial times a ratio of Pochhammer symbols whose
// lengths grow with n.  Factors are only ever appended as n increases, so a
// running product can absorb each new factor in O(order) instead of
// rebuilding every Pochhammer from scratch.

struct PochFactorState {
    Monomial arg;
    Exponent base;
    QuadExp len;
    bool inverted; // true when the symbol sits in the denominator
    std::int64_t applied = 0;
};

struct FastSummand {
    // constant scalars and exponents, as functions of n
    std::vector<const PowAtom*> pows; // contribute sign/scalar and exponent
    QuadExp mono_exp;                 // accumulated q-exponent
    Int const_scalar = 1;
    int sign = 1;
    std::vector<PochFactorState> pochs;
    std::vector<std::pair<ExprPtr, bool>> other; // (subtree, inverted)
    bool ok = true;

    void collect(const ExprPtr& e, bool inv) {
        if (!ok) return;
        if (const auto* b = std::get_if<BinOp>(&e->node)) {
            if (b->op == '*') { collect(b->a, inv); collect(b->b, inv); return; }
            if (b->op == '/') { collect(b->a, inv); collect(b->b, !inv); return; }
            other.emplace_back(e, inv);
            return;
        }
        if (const auto* ng = std::get_if<Neg>(&e->node)) {
            sign = -sign;
            collect(ng->a, inv);
            return;
        }
        if (const auto* il = std::get_if<IntLit>(&e->node)) {
            if (inv) { other.emplace_back(e, inv); return; }
            const_scalar *= il->v;
            return;
        }
        if (const auto* qm = std::get_if<QMono>(&e->node)) {
            sign *= qm->sign;
            mono_exp = inv ? mono_exp - qm->exp : mono_exp + qm->exp;
            return;
        }
        if (const auto* pw = std::get_if<PowAtom>(&e->node)) {
            if (inv) { other.emplace_back(e, inv); return; }
            pows.push_back(pw);
            mono_exp = mono_exp + pw->pow.scaled(pw->base_exp);
            return;
        }
        if (const auto* pc = std::get_if<Poch>(&e->node)) {
            bool const_args = true;
            for (const auto& a : pc->args)
                if (!a.exp.is_constant()) const_args = false;
            if (pc->len && const_args) {
                for (const auto& a : pc->args)
                    pochs.push_back(
                        PochFactorState{Monomial(a.coeff, a.exp.C), pc->base, *pc->len, inv, 0});
                return;
            }
            other.emplace_back(e, inv);
            return;
        }
        other.emplace_back(e, inv);
    }
};

class FastSum {
public:
    FastSum(const Sum& s, const Ctx& c) : ctx_(c) {
        fs_.collect(s.body, false);
        prod_ = Series::one().truncated(ctx_.W + Exponent(2));
    }

    bool usable() const { return fs_.ok; }

    // term at n, exact below ~W, as series / integer denominator
    std::pair<Series, Int> term(std::int64_t n) {
        // advance running Pochhammer product
        for (auto& st : fs_.pochs) {
            std::int64_t target = checked_int_len(st.len.eval(n), "Pochhammer length");
            advance(st, target);
        }
        Int scalar = fs_.const_scalar;
        if (fs_.sign < 0) scalar = -scalar;
        Exponent e = fs_.mono_exp.eval(n);
        for (const auto* pw : fs_.pows) scalar *= pow_scalar(pw->base_coeff, pw->pow.eval(n));
        if (scalar == 0) return {Series::zero_exact(), Int(1)};

        Series num = prod_;
        Series den = Series::one();
        if (!fs_.other.empty()) {
            Ctx c2 = ctx_;
            c2.n = n;
            for (const auto& [sub, inv] : fs_.other) {
                SVal v = eval_node(sub, c2);
                if (!inv) {
                    num = num * v.num;
                    if (!v.den.is_one()) den = den * v.den;
                } else {
                    if (!v.num.is_one()) den = den * v.num;
                    num = num * v.den;
                }
            }
        }
        num = num.times_monomial(scalar, e);
        if (den.is_one()) return {std::move(num), den_const_};
        auto [t, g] = divide_rational(num, den, ctx_.W);
        return {std::move(t), g * den_const_};
    }

private:
    Ctx ctx_;
    FastSummand fs_;
    Series prod_;
    Int den_const_ = 1;

    void advance(PochFactorState& st, std::int64_t target) {
        Monomial base = Monomial::q(st.base);
        while (st.applied < target) {
            apply_factor(st.arg * base.pow_int(st.applied), st.inverted);
            ++st.applied;
        }
        while (st.applied > target) {
            --st.applied;
            apply_factor(st.arg * base.pow_int(st.applied), !st.inverted);
        }
    }

    // multiplies (inverted=false) or divides (inverted=true) by (1 - m)
    void apply_factor(const Monomial& m, bool inverted) {
        if (m.exp.is_zero()) {
            Int v = Int(1) - m.coeff;
            if (!inverted) {
                prod_ = prod_.times_monomial(v, Exponent(0)); // may zero the product
            } else {
                if (v == 0)
                    throw Error(Errc::VanishingFactor, "vanishing Pochhammer factor 1 - " + m.str());
                den_const_ *= v;
            }
            return;
        }
        if (!inverted) prod_ = prod_.times_binomial(-m.coeff, m.exp);
        else prod_ = prod_.divided_by_binomial(-m.coeff, m.exp);
    }
};

std::int64_t summand_lattice(const ExprPtr& e) {
    std::int64_t l = 1;
    auto fold = [&](const QuadExp& p) { l = std::lcm(l, std::lcm(std::lcm(p.A.den, p.B.den), p.C.den)); };
    struct Walk {
        std::function<void(const QuadExp&)> fold;
        void go(const ExprPtr& x) {
            std::visit(
                [&](const auto& node) {
                    using T = std::decay_t<decltype(node)>;
                    if constexpr (std::is_same_v<T, QMono>) fold(node.exp);
                    else if constexpr (std::is_same_v<T, PowAtom>) fold(node.pow);
                    else if constexpr (std::is_same_v<T, BinOp>) { go(node.a); go(node.b); }
                    else if constexpr (std::is_same_v<T, Neg>) go(node.a);
                    else if constexpr (std::is_same_v<T, Poch>) {
                        for (const auto& a : node.args) fold(a.exp);
                        if (node.len) fold(*node.len);
                    } else if constexpr (std::is_same_v<T, Sum>) go(node.body);
                    else if constexpr (std::is_same_v<T, Subst>) go(node.a);
                },
                x->node);
        }
    } w{fold};
    w.go(e);
    return l;
}

Series eval_sum(const Sum& s, const Ctx& c) {
    std::int64_t lat = std::lcm(summand_lattice(s.body), c.W.den);
    double wd = static_cast<double>(c.W.num) / static_cast<double>(c.W.den);
    std::int64_t cap = 20 * static_cast<std::int64_t>(
                                std::ceil(std::sqrt(std::max(1.0, wd * static_cast<double>(lat))))) +
                       64 + s.start;

    FastSum fast(s, c);
    // exact rational accumulation: acc / denom, both integral
    Series acc = Series::zero_exact();
    Int denom(1);
    int dead = 0;
    bool seen_alive = false;
    std::int64_t iters = 0;
    for (std::int64_t n = s.start;; ++n, ++iters) {
        Series t;
        Int tden(1);
        if (fast.usable()) {
            std::tie(t, tden) = fast.term(n);
        } else {
            Ctx c2 = c;
            c2.n = n;
            SVal v = eval_node(s.body, c2);
            if (v.den.is_one()) t = std::move(v.num);
            else std::tie(t, tden) = divide_rational(v.num, v.den, c.W);
        }
        bool is_dead;
        if (t.is_zero()) {
            auto b = t.bound();
            is_dead = !b || !(*b < c.W);
            if (!is_dead) acc = acc + t; // keeps the honest (low) bound
        } else if (!(t.valuation() < c.W)) {
            is_dead = true;
        } else {
            is_dead = false;
            Int l = lcm(denom, tden);
            if (l != denom) acc = acc.times_monomial(Int(l / denom), Exponent(0));
            acc = acc + t.truncated(c.W).times_monomial(Int(l / tden), Exponent(0));
            denom = l;
        }
        if (is_dead) ++dead; else { dead = 0; seen_alive = true; }
        if (dead >= 3 && (seen_alive || iters >= 32)) break;
        if (n > cap)
            throw Error(Errc::SumDivergence,
                        "sum exceeded the iteration cap without settling (n > " +
                            std::to_string(cap) + ")");
    }
    if (denom != 1) acc = acc.div_exact(denom);
    return acc;
}

SVal eval_node(const ExprPtr& e, const Ctx& c) {
    return std::visit(
        [&](const auto& node) -> SVal {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, IntLit>) {
                return SVal{Series::monomial(node.v, Exponent(0)), Series::one()};
            } else if constexpr (std::is_same_v<T, QMono>) {
                Exponent x = quad_at(node.exp, c.n);
                return SVal{Series::monomial(Int(node.sign), x), Series::one()};
            } else if constexpr (std::is_same_v<T, PowAtom>) {
                Exponent p = quad_at(node.pow, c.n);
                Exponent x = node.base_exp * p;
                if (node.base_coeff == 0) {
                    if (!(Exponent(0) < p) && !p.is_zero())
                        throw Error(Errc::DivisionByZero, "negative power of zero");
                    return SVal{p.is_zero() ? Series::one() : Series::zero_exact(), Series::one()};
                }
                Int scalar = pow_scalar(node.base_coeff, p);
                return SVal{Series::monomial(scalar, x), Series::one()};
            } else if constexpr (std::is_same_v<T, BinOp>) {
                SVal a = eval_node(node.a, c);
                SVal b = eval_node(node.b, c);
                SVal r;
                switch (node.op) {
                case '*':
                    r.num = a.num * b.num;
                    r.den = a.den.is_one() ? b.den : (b.den.is_one() ? a.den : a.den * b.den);
                    return r;
                case '/':
                    r.num = b.den.is_one() ? a.num : a.num * b.den;
                    r.den = a.den.is_one() ? b.num : a.den * b.num;
                    return r;
                case '+':
                case '-': {
                    Series bn = node.op == '-' ? -b.num : b.num;
                    if (a.den.is_one() && b.den.is_one())
                        return SVal{a.num + bn, Series::one()};
                    r.num = a.num * b.den + bn * a.den;
                    r.den = a.den * b.den;
                    return r;
                }
                }
                throw Error(Errc::InvariantViolation, "bad operator");
            } else if constexpr (std::is_same_v<T, Neg>) {
                SVal a = eval_node(node.a, c);
                a.num = -a.num;
                return a;
            } else if constexpr (std::is_same_v<T, Poch>) {
                if (!node.len) return SVal{poch_inf_product(node, c), Series::one()};
                return poch_finite_pair(node, c);
            } else if constexpr (std::is_same_v<T, Theta>) {
                return SVal{theta_atom(node, c.W), Series::one()};
            } else if constexpr (std::is_same_v<T, Sum>) {
                return SVal{eval_sum(node, c), Series::one()};
            } else if constexpr (std::is_same_v<T, ExtRef>) {
                if (!c.ext || !c.ext->resolver)
                    throw Error(Errc::UnresolvedReference,
                                "@expr(" + node.id + "," + std::to_string(node.idx) +
                                    ") without a catalog resolver");
                return SVal{c.ext->resolver(node.id, node.idx, c.W), Series::one()};
            } else if constexpr (std::is_same_v<T, Subst>) {
                Ctx c2 = c;
                if (!node.neg_q) c2.W = c.W / node.pow;
                SVal v = eval_node(node.a, c2);
                Series s = v.den.is_one() ? v.num : Series::divide(v.num, v.den, c2.W);
                return SVal{node.neg_q ? s.substitute_neg() : s.substitute_power(node.pow),
                            Series::one()};
            } else {
                throw Error(Errc::InvariantViolation, "unhandled node");
            }
        },
        e->node);
}

} // namespace

Series eval_series(const ExprPtr& e, Exponent N, const EvalContext& ctx) {
    Exponent W = N;
    for (int attempt = 0; attempt < 6; ++attempt) {
        Ctx c{W, std::nullopt, &ctx};
        SVal v = eval_node(e, c);
        Series r = v.den.is_one() ? v.num : Series::divide(v.num, v.den, W);
        auto b = r.bound();
        if (!b || !(*b < N)) return r.truncated(N);
        W = W + (N - *b) + Exponent(2);
    }
    throw Error(Errc::InvariantViolation, "evaluation failed to reach the requested order");
}

RationalFunctionQ eval_rational(const ExprPtr& e, std::int64_t n) {
    return std::visit(
        [&](const auto& node) -> RationalFunctionQ {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, IntLit>) {
                return RationalFunctionQ::from_int(node.v);
            } else if constexpr (std::is_same_v<T, QMono>) {
                return RationalFunctionQ::from_monomial(Int(node.sign), node.exp.eval(n));
            } else if constexpr (std::is_same_v<T, PowAtom>) {
                Exponent p = node.pow.eval(n);
                if (node.base_coeff == 0)
                    return p.is_zero() ? RationalFunctionQ::from_int(Int(1))
                                       : RationalFunctionQ::from_int(Int(0));
                return RationalFunctionQ::from_monomial(pow_scalar(node.base_coeff, p),
                                                        node.base_exp * p);
            } else if constexpr (std::is_same_v<T, BinOp>) {
                RationalFunctionQ a = eval_rational(node.a, n);
                RationalFunctionQ b = eval_rational(node.b, n);
                switch (node.op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                case '/': return a / b;
                }
                throw Error(Errc::InvariantViolation, "bad operator");
            } else if constexpr (std::is_same_v<T, Neg>) {
                return -eval_rational(node.a, n);
            } else if constexpr (std::is_same_v<T, Poch>) {
                if (!node.len)
                    throw Error(Errc::WrongParameter,
                                "infinite Pochhammer is not a rational function");
                std::int64_t L = checked_int_len(node.len->eval(n), "Pochhammer length");
                RationalFunctionQ r = RationalFunctionQ::from_int(Int(1));
                for (const auto& a : node.args) {
                    Monomial m(a.coeff, a.exp.eval(n));
                    r = r * poch_finite(m, Monomial::q(node.base), L);
                }
                return r;
            } else {
                throw Error(Errc::WrongParameter,
                            "expression is not a rational function of q");
            }
        },
        e->node);
}

// ---- valuation bounds and validation -------------------------------------

namespace {

// lower bound (lo) and upper estimate (hi) for the valuation at n
struct ValRange {
    Exponent lo, hi;
};

Exponent theta_min_exponent(const Theta& t);

ValRange val_range(const ExprPtr& e, std::int64_t n) {
    return std::visit(
        [&](const auto& node) -> ValRange {
            using T = std::decay_t<decltype(node)>;
            if constexpr (std::is_same_v<T, IntLit>) {
                return {Exponent(0), Exponent(0)};
            } else if constexpr (std::is_same_v<T, QMono>) {
                Exponent v = node.exp.eval(n);
                return {v, v};
            } else if constexpr (std::is_same_v<T, PowAtom>) {
                Exponent v = node.base_exp * node.pow.eval(n);
                return {v, v};
            } else if constexpr (std::is_same_v<T, BinOp>) {
                ValRange a = val_range(node.a, n);
                ValRange b = val_range(node.b, n);
                switch (node.op) {
                case '*': return {a.lo + b.lo, a.hi + b.hi};
                case '/': return {a.lo - b.hi, a.hi - b.lo};
                case '+':
                case '-':
                    // cancellation can only raise the valuation
                    return {std::min(a.lo, b.lo), std::min(a.hi, b.hi)};
                }
                throw Error(Errc::InvariantViolation, "bad operator");
            } else if constexpr (std::is_same_v<T, Neg>) {
                return val_range(node.a, n);
            } else if constexpr (std::is_same_v<T, Poch>) {
                // product of binomials: valuation is the exact sum of the
                // negative factor exponents
                Exponent total(0);
                for (const auto& a : node.args) {
                    Exponent ea = a.exp.is_constant() ? a.exp.C : a.exp.eval(n);
                    std::int64_t L = node.len ? checked_int_len(node.len->eval(n), "length")
                                              : (1 << 20);
                    if (!node.len) {
                        // infinite: only finitely many negative exponents
                        if (ea < Exponent(0)) {
                            for (std::int64_t j = 0;; ++j) {
                                Exponent ej = ea + node.base * Exponent(j);
                                if (!(ej < Exponent(0))) break;
                                total = total + ej;
                            }
                        }
                        continue;
                    }
                    if (L >= 0) {
                        for (std::int64_t j = 0; j < L; ++j) {
                            Exponent ej = ea + node.base * Exponent(j);
                            if (!(ej < Exponent(0))) break; // ascending
                            total = total + ej;
                        }
                    } else {
                        for (std::int64_t j = 1; j <= -L; ++j) {
                            Exponent ej = ea - node.base * Exponent(j);
                            if (ej < Exponent(0)) total = total - ej;
                        }
                    }
                }
                return {total, total};
            } else if constexpr (std::is_same_v<T, Theta>) {
                Exponent m = theta_min_exponent(node);
                return {m, m};
            } else {
                return {Exponent(0), Exponent(0)};
            }
        },
        e->node);
}

Exponent bilinear_min(const Exponent& ea, const Exponent& eb) {
    // min over integer n of ea*n(n+1)/2 + eb*n(n-1)/2
    Exponent best(0);
    for (std::int64_t n = -64; n <= 64; ++n) {
        Exponent v = ea * Exponent(n * (n + 1) / 2) + eb * Exponent(n * (n - 1) / 2);
        if (v < best) best = v;
    }
    return best;
}

Exponent theta_min_exponent(const Theta& t) {
    switch (t.kind) {
    case ThetaKind::F:
    case ThetaKind::FalsePsi: return bilinear_min(t.a.exp, t.b->exp);
    case ThetaKind::QuintQ: {
        Exponent m1 = bilinear_min(t.a.exp + t.b->exp * Exponent(3),
                                   t.a.exp * Exponent(2) - t.b->exp * Exponent(3));
        Exponent m2 = t.b->exp + bilinear_min(t.a.exp - t.b->exp * Exponent(3),
                                              t.a.exp * Exponent(2) + t.b->exp * Exponent(3));
        return std::min(m1, m2);
    }
    case ThetaKind::Phi:
    case ThetaKind::Psi:
    case ThetaKind::Fneg:
    case ThetaKind::Chi: return Exponent(0);
    }
    return Exponent(0);
}

void validate_impl(const ExprPtr& e, bool allow_ext, const std::string& var, bool in_sum) {
    std::visit(
        [&](const auto& node) {
            using T = std::decay_t<decltype(node)>;
            auto check_quad = [&](const QuadExp& p) {
                if (!p.is_constant() && !in_sum)
                    throw Error(Errc::WrongParameter, "free summation variable in closed expression");
            };
            if constexpr (std::is_same_v<T, QMono>) {
                check_quad(node.exp);
            } else if constexpr (std::is_same_v<T, PowAtom>) {
                check_quad(node.pow);
                if (node.base_coeff != 1 && !node.pow.integer_valued())
                    throw Error(Errc::WrongParameter,
                                "signed power base with a non-integer-valued exponent");
            } else if constexpr (std::is_same_v<T, BinOp>) {
                validate_impl(node.a, allow_ext, var, in_sum);
                validate_impl(node.b, allow_ext, var, in_sum);
            } else if constexpr (std::is_same_v<T, Neg>) {
                validate_impl(node.a, allow_ext, var, in_sum);
            } else if constexpr (std::is_same_v<T, Poch>) {
                for (const auto& a : node.args) {
                    check_quad(a.exp);
                    if (!a.exp.is_affine())
                        throw Error(Errc::WrongParameter, "Pochhammer argument must be affine in n");
                }
                if (node.len) {
                    check_quad(*node.len);
                    if (!node.len->is_affine() || node.len->B < Exponent(0))
                        throw Error(Errc::WrongParameter, "Pochhammer length must be affine, slope >= 0");
                }
                if (!(Exponent(0) < node.base))
                    throw Error(Errc::WrongParameter, "Pochhammer base exponent must be positive");
            } else if constexpr (std::is_same_v<T, Sum>) {
                if (in_sum) throw Error(Errc::WrongParameter, "nested sums are unsupported");
                validate_impl(node.body, allow_ext, node.var, true);
                // the valuation bound must eventually grow without bound
                auto B = [&](std::int64_t n) { return sum_valuation_bound(node.body, n); };
                Exponent d1 = B(258) - B(257), d2 = B(259) - B(258);
                Exponent e1 = B(512) - B(511), e2 = B(513) - B(512);
                Exponent c1 = d2 - d1, c2 = e2 - e1;
                bool growing = (c1 == c2) && (Exponent(0) < c1 ||
                                              (c1.is_zero() && Exponent(0) < d2 && d2 == e2));
                if (!growing)
                    throw Error(Errc::UnboundedBelow,
                                "summand valuation bound does not grow: " +
                                    print_canonical(node.body));
            } else if constexpr (std::is_same_v<T, ExtRef>) {
                if (!allow_ext)
                    throw Error(Errc::WrongParameter, "@expr reference outside table checks");
            } else if constexpr (std::is_same_v<T, Subst>) {
                if (!allow_ext)
                    throw Error(Errc::WrongParameter, "substitution outside table checks");
                validate_impl(node.a, allow_ext, var, in_sum);
            }
        },
        e->node);
}

} // namespace

Exponent sum_valuation_bound(const ExprPtr& summand, std::int64_t n) {
    return val_range(summand, n).lo;
}

void validate_expr(const ExprPtr& e, bool allow_ext) {
    validate_impl(e, allow_ext, "", false);
}

} // namespace qidforge

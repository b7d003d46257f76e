#include "qidforge/ast.hpp"

#include <sstream>

#include "qidforge/error.hpp"

namespace qidforge {

QuadExp mul_checked(const QuadExp& x, const QuadExp& y) {
    // (A1 n^2 + B1 n + C1)(A2 n^2 + B2 n + C2), degree must stay <= 2
    bool bad = (!x.A.is_zero() && !(y.A.is_zero() && y.B.is_zero())) ||
               (!y.A.is_zero() && !(x.A.is_zero() && x.B.is_zero())) ||
               (!x.B.is_zero() && !y.A.is_zero()) || (!x.A.is_zero() && !y.B.is_zero());
    if (bad) throw Error(Errc::ParseError, "exponent polynomial exceeds degree 2");
    return {x.A * y.C + y.A * x.C + x.B * y.B, x.B * y.C + y.B * x.C, x.C * y.C};
}

std::string QuadExp::str(const std::string& var) const {
    // single-fraction canonical form: (P)/d with integer P, d omitted when 1
    std::int64_t d = std::lcm(std::lcm(A.den, B.den), C.den);
    auto term = [&](std::ostringstream& os, std::int64_t coeff, int deg, bool* first) {
        if (coeff == 0) return;
        if (*first) {
            if (coeff < 0) os << "-";
            *first = false;
        } else {
            os << (coeff < 0 ? "-" : "+");
        }
        std::int64_t a = coeff < 0 ? -coeff : coeff;
        if (a != 1 || deg == 0) {
            os << a;
            if (deg > 0) os << "*";
        }
        if (deg == 2) os << var << "^2";
        else if (deg == 1) os << var;
    };
    std::ostringstream body;
    bool first = true;
    term(body, A.num * (d / A.den), 2, &first);
    term(body, B.num * (d / B.den), 1, &first);
    term(body, C.num * (d / C.den), 0, &first);
    if (first) return "0";
    if (d == 1) return body.str();
    return "(" + body.str() + ")/" + std::to_string(d);
}

const char* theta_name(ThetaKind k) {
    switch (k) {
    case ThetaKind::F: return "f";
    case ThetaKind::QuintQ: return "Q";
    case ThetaKind::FalsePsi: return "Psi";
    case ThetaKind::Phi: return "phi";
    case ThetaKind::Psi: return "psi";
    case ThetaKind::Fneg: return "fneg";
    case ThetaKind::Chi: return "chi";
    }
    return "?";
}

ExprPtr make_expr(Node n) { return std::make_shared<const Expr>(std::move(n)); }
ExprPtr make_int(Int v) { return make_expr(IntLit{std::move(v)}); }
ExprPtr make_binop(char op, ExprPtr a, ExprPtr b) {
    return make_expr(BinOp{op, std::move(a), std::move(b)});
}

namespace {

int precedence_of(const ExprPtr& e) {
    if (std::holds_alternative<BinOp>(e->node)) {
        char op = std::get<BinOp>(e->node).op;
        return (op == '+' || op == '-') ? 1 : 2;
    }
    if (std::holds_alternative<Neg>(e->node)) return 1;
    return 3;
}

std::string exp_print(const Exponent& e) {
    if (e.den == 1 && e.num >= 0) return std::to_string(e.num);
    return "(" + e.str() + ")";
}

std::string sarg_print(const SArg& s, const std::string& var) {
    std::string out;
    Int c = s.coeff;
    if (c < 0) { out += "-"; c = -c; }
    if (s.exp.is_zero()) return out + c.get_str();
    if (c != 1) out += c.get_str() + "*";
    out += "q";
    if (!(s.exp.is_constant() && s.exp.C == Exponent(1)))
        out += "^(" + s.exp.str(var) + ")";
    return out;
}

std::string mono_print(const Monomial& m) {
    return m.str();
}

struct Printer {
    std::string var = "n";

    std::string print(const ExprPtr& e, int parent_prec, bool right_operand) const {
        int prec = precedence_of(e);
        std::string body = print_node(e);
        if (prec < parent_prec || (prec == parent_prec && right_operand && prec < 3))
            return "(" + body + ")";
        return body;
    }

    std::string print_node(const ExprPtr& e) const {
        return std::visit(
            [&](const auto& n) -> std::string { return pr(n); }, e->node);
    }

    std::string pr(const IntLit& n) const {
        return n.v < 0 ? "(" + n.v.get_str() + ")" : n.v.get_str();
    }
    std::string pr(const QMono& n) const {
        std::string s = n.sign < 0 ? "-" : "";
        s += "q";
        if (!(n.exp.is_constant() && n.exp.C == Exponent(1)))
            s += "^(" + n.exp.str(var) + ")";
        return n.sign < 0 ? "(" + s + ")" : s;
    }
    std::string pr(const PowAtom& n) const {
        std::string base;
        if (n.base_exp.is_zero()) {
            base = n.base_coeff.get_str();
        } else {
            base = (n.base_coeff == -1 ? "-" : n.base_coeff == 1 ? "" : n.base_coeff.get_str() + "*");
            base += "q";
            if (!(n.base_exp == Exponent(1))) base += "^" + exp_print(n.base_exp);
        }
        return "(" + base + ")^(" + n.pow.str(var) + ")";
    }
    std::string pr(const BinOp& n) const {
        int prec = (n.op == '+' || n.op == '-') ? 1 : 2;
        return print(n.a, prec, false) + " " + n.op + " " + print(n.b, prec, true);
    }
    std::string pr(const Neg& n) const { return "-" + print(n.a, 2, true); }
    std::string pr(const Poch& n) const {
        std::string s = "poch(";
        for (std::size_t i = 0; i < n.args.size(); ++i) {
            if (i) s += ", ";
            s += sarg_print(n.args[i], var);
        }
        s += "; q";
        if (!(n.base == Exponent(1))) s += "^" + exp_print(n.base);
        s += "; ";
        s += n.len ? n.len->str(var) : "inf";
        return s + ")";
    }
    std::string pr(const Theta& n) const {
        std::string s = std::string(theta_name(n.kind)) + "(" + mono_print(n.a);
        if (n.b) s += ", " + mono_print(*n.b);
        return s + ")";
    }
    std::string pr(const Sum& n) const {
        Printer inner{n.var};
        return "sum(" + n.var + ">=" + std::to_string(n.start) + ", " +
               inner.print(n.body, 0, false) + ")";
    }
    std::string pr(const ExtRef& n) const {
        return "@expr(" + n.id + "," + std::to_string(n.idx) + ")";
    }
    std::string pr(const Subst& n) const {
        std::string tgt = n.neg_q ? "-q" : ("q^(" + n.pow.str() + ")");
        return print(n.a, 3, false) + "[q->" + tgt + "]";
    }
};

} // namespace

std::string print_canonical(const ExprPtr& e) {
    Printer p;
    return p.print(e, 0, false);
}

bool structurally_equal(const ExprPtr& a, const ExprPtr& b) {
    if (a->node.index() != b->node.index()) return false;
    if (const auto* x = std::get_if<IntLit>(&a->node))
        return x->v == std::get<IntLit>(b->node).v;
    if (const auto* x = std::get_if<QMono>(&a->node)) {
        const auto& y = std::get<QMono>(b->node);
        return x->sign == y.sign && x->exp == y.exp;
    }
    if (const auto* x = std::get_if<PowAtom>(&a->node)) {
        const auto& y = std::get<PowAtom>(b->node);
        return x->base_coeff == y.base_coeff && x->base_exp == y.base_exp && x->pow == y.pow;
    }
    if (const auto* x = std::get_if<BinOp>(&a->node)) {
        const auto& y = std::get<BinOp>(b->node);
        return x->op == y.op && structurally_equal(x->a, y.a) && structurally_equal(x->b, y.b);
    }
    if (const auto* x = std::get_if<Neg>(&a->node))
        return structurally_equal(x->a, std::get<Neg>(b->node).a);
    if (const auto* x = std::get_if<Poch>(&a->node)) {
        const auto& y = std::get<Poch>(b->node);
        if (x->args.size() != y.args.size() || !(x->base == y.base)) return false;
        if (x->len.has_value() != y.len.has_value()) return false;
        if (x->len && !(*x->len == *y.len)) return false;
        for (std::size_t i = 0; i < x->args.size(); ++i)
            if (!(x->args[i].coeff == y.args[i].coeff && x->args[i].exp == y.args[i].exp))
                return false;
        return true;
    }
    if (const auto* x = std::get_if<Theta>(&a->node)) {
        const auto& y = std::get<Theta>(b->node);
        if (x->kind != y.kind || !(x->a == y.a)) return false;
        if (x->b.has_value() != y.b.has_value()) return false;
        return !x->b || *x->b == *y.b;
    }
    if (const auto* x = std::get_if<Sum>(&a->node)) {
        const auto& y = std::get<Sum>(b->node);
        return x->var == y.var && x->start == y.start && structurally_equal(x->body, y.body);
    }
    if (const auto* x = std::get_if<ExtRef>(&a->node)) {
        const auto& y = std::get<ExtRef>(b->node);
        return x->id == y.id && x->idx == y.idx;
    }
    if (const auto* x = std::get_if<Subst>(&a->node)) {
        const auto& y = std::get<Subst>(b->node);
        return x->neg_q == y.neg_q && x->pow == y.pow && structurally_equal(x->a, y.a);
    }
    return false;
}

} // namespace qidforge

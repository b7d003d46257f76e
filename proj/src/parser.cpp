#include "qidforge/parser.hpp"

#include <cctype>

#include "qidforge/error.hpp"

namespace qidforge {

namespace {

struct Scanner {
    const std::string& text;
    std::size_t pos = 0;
    int line = 1, col = 1;

    explicit Scanner(const std::string& t) : text(t) {}

    void advance() {
        if (pos < text.size()) {
            if (text[pos] == '\n') { ++line; col = 1; }
            else ++col;
            ++pos;
        }
    }
    void skip_ws() {
        for (;;) {
            while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
                advance();
            if (pos < text.size() && text[pos] == '#') {
                while (pos < text.size() && text[pos] != '\n') advance();
                continue;
            }
            break;
        }
    }
    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }
    bool try_eat(char c) {
        if (peek() == c) { advance(); return true; }
        return false;
    }
    bool try_eat(const std::string& s) {
        skip_ws();
        if (text.compare(pos, s.size(), s) == 0) {
            for (std::size_t i = 0; i < s.size(); ++i) advance();
            return true;
        }
        return false;
    }
    void expect(char c, const std::string& what) {
        if (!try_eat(c)) fail("'" + std::string(1, c) + "' (" + what + ")");
    }
    [[noreturn]] void fail(const std::string& expected) {
        std::string got = pos < text.size() ? std::string(1, text[pos]) : "end of input";
        throw ParseError(line, col, expected, got);
    }
    bool at_digit() { return std::isdigit(static_cast<unsigned char>(peek())); }
    bool at_alpha() {
        char c = peek();
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    }
    std::int64_t read_int() {
        skip_ws();
        if (!at_digit()) fail("integer");
        std::int64_t v = 0;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            v = v * 10 + (text[pos] - '0');
            if (v < 0) fail("smaller integer");
            advance();
        }
        return v;
    }
    Int read_bigint() {
        skip_ws();
        if (!at_digit()) fail("integer");
        std::string s;
        while (pos < text.size() && std::isdigit(static_cast<unsigned char>(text[pos]))) {
            s += text[pos];
            advance();
        }
        return Int(s);
    }
    std::string read_ident() {
        skip_ws();
        if (!at_alpha()) fail("identifier");
        std::string s;
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_')) {
            s += text[pos];
            advance();
        }
        return s;
    }
    // raw token up to a delimiter, for catalog ids inside @expr(...)
    std::string read_raw_until(char delim) {
        skip_ws();
        std::string s;
        while (pos < text.size() && text[pos] != delim && text[pos] != '\n') {
            s += text[pos];
            advance();
        }
        while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
        return s;
    }
};

struct FoldedMono {
    Int coeff;
    QuadExp exp;
};

class Parser {
public:
    Parser(const std::string& text, const ParserOptions& opts) : sc_(text), opts_(opts) {}

    ExprPtr parse_full() {
        ExprPtr e = parse_sum_expr();
        sc_.skip_ws();
        if (sc_.pos != sc_.text.size()) sc_.fail("end of input");
        return e;
    }

private:
    Scanner sc_;
    ParserOptions opts_;
    std::string current_var_; // empty when outside a sum

    bool var_allowed(const std::string& name) const {
        if (!current_var_.empty()) return name == current_var_;
        return opts_.allow_free_n && name == "n";
    }

    ExprPtr parse_sum_expr() {
        ExprPtr e = parse_term();
        for (;;) {
            if (sc_.try_eat('+')) e = make_binop('+', e, parse_term());
            else if (sc_.try_eat('-')) e = make_binop('-', e, parse_term());
            else return e;
        }
    }

    ExprPtr parse_term() {
        ExprPtr e = parse_unary();
        for (;;) {
            if (sc_.try_eat('*')) e = make_binop('*', e, parse_unary());
            else if (peek_is_division()) { sc_.expect('/', "division"); e = make_binop('/', e, parse_unary()); }
            else return e;
        }
    }

    bool peek_is_division() { return sc_.peek() == '/'; }

    ExprPtr parse_unary() {
        if (sc_.try_eat('-')) {
            ExprPtr a = parse_unary();
            if (const auto* il = std::get_if<IntLit>(&a->node)) return make_int(-il->v);
            if (const auto* qm = std::get_if<QMono>(&a->node))
                return make_expr(QMono{-qm->sign, qm->exp});
            return make_expr(Neg{a});
        }
        return parse_postfix();
    }

    ExprPtr parse_postfix() {
        ExprPtr e = parse_atom();
        while (opts_.allow_ext && sc_.peek() == '[') {
            sc_.expect('[', "substitution");
            if (!sc_.try_eat("q->")) sc_.fail("'q->'");
            bool negq = false;
            Exponent pw(1);
            if (sc_.try_eat("-q")) {
                negq = true;
            } else {
                if (!sc_.try_eat('q')) sc_.fail("'q' in substitution target");
                if (sc_.try_eat('^')) pw = parse_exponent_rational();
            }
            sc_.expect(']', "substitution");
            e = make_expr(Subst{e, negq, pw});
        }
        return e;
    }

    ExprPtr parse_atom() {
        sc_.skip_ws();
        char c = sc_.peek();
        if (c == '@') {
            if (!opts_.allow_ext) sc_.fail("expression atom");
            return parse_extref();
        }
        if (c == '$')
            sc_.fail("expression atom (unsubstituted template parameter)");
        if (c == '(') return parse_paren_or_pow();
        if (std::isdigit(static_cast<unsigned char>(c))) {
            Int v = sc_.read_bigint();
            if (sc_.peek() == '^') return parse_pow_with_base(std::move(v), Exponent(0));
            return make_int(std::move(v));
        }
        if (sc_.at_alpha()) {
            std::size_t save_pos = sc_.pos;
            int save_line = sc_.line, save_col = sc_.col;
            std::string id = sc_.read_ident();
            if (id == "q") return parse_qpow_atom();
            if (id == "sum") return parse_sum_node();
            if (id == "poch") return parse_poch();
            if (id == "f") return parse_theta(ThetaKind::F, 2);
            if (id == "Q") return parse_theta(ThetaKind::QuintQ, 2);
            if (id == "Psi") return parse_theta(ThetaKind::FalsePsi, 2);
            if (id == "phi") return parse_theta(ThetaKind::Phi, 1);
            if (id == "psi") return parse_theta(ThetaKind::Psi, 1);
            if (id == "fneg") return parse_theta(ThetaKind::Fneg, 1);
            if (id == "chi") return parse_theta(ThetaKind::Chi, 1);
            if (var_allowed(id)) {
                // bare variable appears only inside exponent polynomials
                sc_.pos = save_pos; sc_.line = save_line; sc_.col = save_col;
                sc_.fail("expression atom (bare summation variable)");
            }
            sc_.pos = save_pos; sc_.line = save_line; sc_.col = save_col;
            sc_.fail("expression atom");
        }
        sc_.fail("expression atom");
    }

    ExprPtr parse_extref() {
        sc_.expect('@', "reference");
        std::string kw = sc_.read_ident();
        if (kw != "expr") sc_.fail("'expr' after '@'");
        sc_.expect('(', "@expr");
        std::string id = sc_.read_raw_until(',');
        if (id.empty()) sc_.fail("catalog id");
        sc_.expect(',', "@expr");
        std::int64_t idx = sc_.read_int();
        sc_.expect(')', "@expr");
        return make_expr(ExtRef{id, static_cast<int>(idx)});
    }

    // '(' ... ')' — either grouping or the base of a power atom
    ExprPtr parse_paren_or_pow() {
        sc_.expect('(', "group");
        ExprPtr inner = parse_sum_expr();
        sc_.expect(')', "group");
        if (sc_.peek() != '^') return inner;
        auto folded = fold_const_monomial(inner);
        if (!folded) sc_.fail("signed monomial base before '^'");
        return parse_pow_with_base(folded->first, folded->second);
    }

    ExprPtr parse_pow_with_base(Int coeff, Exponent base_exp) {
        sc_.expect('^', "power");
        QuadExp p = parse_exponent_poly();
        if (p.is_constant()) {
            // constant fold
            if (!p.C.is_integer()) sc_.fail("integer constant power");
            Monomial m(std::move(coeff), base_exp);
            Monomial r = m.pow_int(p.C.num);
            if (r.exp.is_zero()) return make_int(r.coeff);
            if (r.coeff == 1 || r.coeff == -1)
                return make_expr(QMono{r.coeff == -1 ? -1 : 1, QuadExp(r.exp)});
            return make_binop('*', make_int(r.coeff),
                              make_expr(QMono{1, QuadExp(r.exp)}));
        }
        if (coeff != 1 && !p.integer_valued())
            sc_.fail("integer-valued power of a signed base");
        return make_expr(PowAtom{std::move(coeff), base_exp, p});
    }

    // exponent after '^': '(' quadpoly ')' | rational | bare variable
    QuadExp parse_exponent_poly() {
        sc_.skip_ws();
        if (sc_.peek() == '(') {
            sc_.expect('(', "exponent");
            QuadExp p = parse_qp_expr();
            sc_.expect(')', "exponent");
            return p;
        }
        if (sc_.at_alpha()) {
            std::string id = sc_.read_ident();
            if (!var_allowed(id)) sc_.fail("summation variable in exponent");
            return QuadExp::var();
        }
        return QuadExp(parse_exponent_rational());
    }

    Exponent parse_exponent_rational() {
        sc_.skip_ws();
        if (sc_.peek() == '(') {
            sc_.expect('(', "exponent");
            Exponent e = parse_exponent_rational();
            sc_.expect(')', "exponent");
            return e;
        }
        bool neg = false;
        if (sc_.try_eat('-')) neg = true;
        std::int64_t num = sc_.read_int();
        std::int64_t den = 1;
        // greedy: consume '/' only when digits follow
        std::size_t save_pos = sc_.pos;
        int save_line = sc_.line, save_col = sc_.col;
        if (sc_.try_eat('/')) {
            if (sc_.at_digit()) den = sc_.read_int();
            else { sc_.pos = save_pos; sc_.line = save_line; sc_.col = save_col; }
        }
        return Exponent(neg ? -num : num, den);
    }

    ExprPtr parse_qpow_atom() {
        if (sc_.peek() != '^') return make_expr(QMono{1, QuadExp(Exponent(1))});
        sc_.expect('^', "power");
        return make_expr(QMono{1, parse_exponent_poly()});
    }

    // ---- quadratic polynomial sub-language ----

    QuadExp parse_qp_expr() {
        QuadExp e = parse_qp_term();
        for (;;) {
            if (sc_.try_eat('+')) e = e + parse_qp_term();
            else if (sc_.try_eat('-')) e = e - parse_qp_term();
            else return e;
        }
    }
    QuadExp parse_qp_term() {
        QuadExp e = parse_qp_unary();
        for (;;) {
            if (sc_.try_eat('*')) e = mul_checked(e, parse_qp_unary());
            else if (sc_.at_alpha() || sc_.peek() == '(')
                e = mul_checked(e, parse_qp_unary()); // juxtaposition: 3n, n(n+1)
            else if (sc_.peek() == '/') {
                sc_.expect('/', "division");
                QuadExp d = parse_qp_unary();
                if (!d.is_constant() || d.C.is_zero())
                    sc_.fail("nonzero constant divisor in exponent polynomial");
                e = e.scaled(Exponent(d.C.den, d.C.num));
            } else return e;
        }
    }
    QuadExp parse_qp_unary() {
        if (sc_.try_eat('-')) return -parse_qp_unary();
        QuadExp a = parse_qp_atom();
        if (sc_.peek() == '^') {
            sc_.expect('^', "power");
            std::int64_t k = sc_.read_int();
            if (k == 0) return QuadExp(Exponent(1));
            QuadExp r = a;
            for (std::int64_t i = 1; i < k; ++i) r = mul_checked(r, a);
            return r;
        }
        return a;
    }
    QuadExp parse_qp_atom() {
        sc_.skip_ws();
        if (sc_.peek() == '(') {
            sc_.expect('(', "exponent group");
            QuadExp e = parse_qp_expr();
            sc_.expect(')', "exponent group");
            return e;
        }
        if (sc_.at_digit()) return QuadExp(Exponent(sc_.read_int()));
        if (sc_.at_alpha()) {
            std::string id = sc_.read_ident();
            if (!var_allowed(id)) sc_.fail("summation variable");
            return QuadExp::var();
        }
        sc_.fail("exponent polynomial atom");
    }

    // ---- signed monomial expressions (theta and Pochhammer arguments) ----

    FoldedMono parse_sarg_expr() {
        bool neg = sc_.try_eat('-');
        FoldedMono m = parse_sarg_factor();
        for (;;) {
            if (sc_.try_eat('*')) {
                FoldedMono f = parse_sarg_factor();
                m.coeff *= f.coeff;
                m.exp = m.exp + f.exp;
            } else if (sc_.peek() == '/') {
                sc_.expect('/', "division");
                FoldedMono f = parse_sarg_factor();
                if (f.coeff == 0) sc_.fail("nonzero divisor");
                if (f.coeff != 1 && f.coeff != -1) {
                    if (!mpz_divisible_p(m.coeff.get_mpz_t(), f.coeff.get_mpz_t()))
                        sc_.fail("integral coefficient quotient");
                }
                m.coeff /= f.coeff;
                m.exp = m.exp - f.exp;
            } else break;
        }
        if (neg) m.coeff = -m.coeff;
        return m;
    }

    FoldedMono parse_sarg_factor() {
        sc_.skip_ws();
        if (sc_.peek() == '(') {
            sc_.expect('(', "argument group");
            bool neg = sc_.try_eat('-');
            FoldedMono m = parse_sarg_expr();
            if (neg) m.coeff = -m.coeff;
            sc_.expect(')', "argument group");
            if (sc_.peek() == '^') {
                // (monomial)^k with integer k, e.g. substituted $a^2
                sc_.expect('^', "power");
                Exponent k = parse_exponent_rational();
                if (!k.is_integer()) sc_.fail("integer power of a grouped argument");
                Monomial p = Monomial(m.coeff, Exponent(0)).pow_int(k.num);
                return {p.coeff, m.exp.scaled(k)};
            }
            return m;
        }
        if (sc_.at_digit()) return {sc_.read_bigint(), QuadExp(Exponent(0))};
        if (sc_.at_alpha()) {
            std::string id = sc_.read_ident();
            if (id != "q") sc_.fail("'q' or integer in argument");
            if (sc_.peek() == '^') {
                sc_.expect('^', "power");
                return {Int(1), parse_exponent_poly()};
            }
            return {Int(1), QuadExp(Exponent(1))};
        }
        sc_.fail("argument factor");
    }

    ExprPtr parse_poch() {
        sc_.expect('(', "poch");
        std::vector<SArg> args;
        for (;;) {
            FoldedMono m = parse_sarg_expr();
            if (!m.exp.is_affine())
                sc_.fail("affine Pochhammer argument exponent");
            args.push_back(SArg{std::move(m.coeff), m.exp});
            if (sc_.try_eat(',')) continue;
            break;
        }
        sc_.expect(';', "poch base");
        std::string b = sc_.read_ident();
        if (b != "q") sc_.fail("'q' as Pochhammer base");
        Exponent base(1);
        if (sc_.peek() == '^') {
            sc_.expect('^', "power");
            base = parse_exponent_rational();
        }
        if (!(Exponent(0) < base)) sc_.fail("positive Pochhammer base exponent");
        sc_.expect(';', "poch length");
        std::optional<QuadExp> len;
        sc_.skip_ws();
        if (sc_.at_alpha()) {
            std::size_t save_pos = sc_.pos;
            int save_line = sc_.line, save_col = sc_.col;
            std::string id = sc_.read_ident();
            if (id == "inf") {
                len = std::nullopt;
            } else {
                sc_.pos = save_pos; sc_.line = save_line; sc_.col = save_col;
                len = parse_qp_expr();
            }
        } else {
            len = parse_qp_expr();
        }
        if (len) {
            if (!len->is_affine()) sc_.fail("affine Pochhammer length");
            if (len->B < Exponent(0)) sc_.fail("nonnegative length slope");
        }
        sc_.expect(')', "poch");
        return make_expr(Poch{std::move(args), base, len});
    }

    ExprPtr parse_theta(ThetaKind kind, int arity) {
        sc_.expect('(', "theta");
        Monomial a = parse_const_monomial();
        std::optional<Monomial> b;
        if (arity == 2) {
            sc_.expect(',', "theta");
            b = parse_const_monomial();
        }
        sc_.expect(')', "theta");
        return make_expr(Theta{kind, a, b});
    }

    Monomial parse_const_monomial() {
        FoldedMono m = parse_sarg_expr();
        if (!m.exp.is_constant()) sc_.fail("constant theta argument");
        return Monomial(std::move(m.coeff), m.exp.C);
    }

    ExprPtr parse_sum_node() {
        sc_.expect('(', "sum");
        std::string var = sc_.read_ident();
        if (!sc_.try_eat(">=")) sc_.fail("'>='");
        std::int64_t start = sc_.read_int();
        if (start != 0 && start != 1) sc_.fail("sum start 0 or 1");
        sc_.expect(',', "sum");
        if (!current_var_.empty()) sc_.fail("unnested sum (nested sums unsupported)");
        current_var_ = var;
        ExprPtr body = parse_sum_expr();
        current_var_.clear();
        sc_.expect(')', "sum");
        return make_expr(Sum{var, static_cast<int>(start), body});
    }

    // tries to see a parenthesized expression as +-c*q^e (constant)
    static std::optional<std::pair<Int, Exponent>> fold_const_monomial(const ExprPtr& e) {
        if (const auto* il = std::get_if<IntLit>(&e->node))
            return std::make_pair(il->v, Exponent(0));
        if (const auto* qm = std::get_if<QMono>(&e->node)) {
            if (!qm->exp.is_constant()) return std::nullopt;
            return std::make_pair(Int(qm->sign), qm->exp.C);
        }
        if (const auto* ng = std::get_if<Neg>(&e->node)) {
            auto inner = fold_const_monomial(ng->a);
            if (!inner) return std::nullopt;
            return std::make_pair(-inner->first, inner->second);
        }
        if (const auto* op = std::get_if<BinOp>(&e->node)) {
            if (op->op != '*' && op->op != '/') return std::nullopt;
            auto x = fold_const_monomial(op->a), y = fold_const_monomial(op->b);
            if (!x || !y) return std::nullopt;
            if (op->op == '*') return std::make_pair(x->first * y->first, x->second + y->second);
            if (y->first == 0) return std::nullopt;
            if (y->first != 1 && y->first != -1 &&
                !mpz_divisible_p(x->first.get_mpz_t(), y->first.get_mpz_t()))
                return std::nullopt;
            return std::make_pair(x->first / y->first, x->second - y->second);
        }
        return std::nullopt;
    }
};

} // namespace

ExprPtr parse_expr(const std::string& text, const ParserOptions& opts) {
    Parser p(text, opts);
    return p.parse_full();
}

} // namespace qidforge

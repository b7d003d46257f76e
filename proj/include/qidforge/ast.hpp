#pragma once

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qidforge/qkit.hpp"

namespace qidforge {

// Quadratic polynomial A n^2 + B n + C with rational coefficients; the shape
// of every exponent and Pochhammer length in the language.
struct QuadExp {
    Exponent A = Exponent(0);
    Exponent B = Exponent(0);
    Exponent C = Exponent(0);

    QuadExp() = default;
    explicit QuadExp(Exponent c) : C(c) {}
    QuadExp(Exponent a, Exponent b, Exponent c) : A(a), B(b), C(c) {}
    static QuadExp var() { return QuadExp(Exponent(0), Exponent(1), Exponent(0)); }

    bool is_constant() const { return A.is_zero() && B.is_zero(); }
    bool is_affine() const { return A.is_zero(); }
    bool is_zero() const { return is_constant() && C.is_zero(); }
    // maps integers to integers
    bool integer_valued() const {
        return (A + A).is_integer() && (A + B).is_integer() && C.is_integer();
    }
    Exponent eval(std::int64_t n) const {
        return A * Exponent(n) * Exponent(n) + B * Exponent(n) + C;
    }

    friend QuadExp operator+(const QuadExp& x, const QuadExp& y) {
        return {x.A + y.A, x.B + y.B, x.C + y.C};
    }
    friend QuadExp operator-(const QuadExp& x, const QuadExp& y) {
        return {x.A - y.A, x.B - y.B, x.C - y.C};
    }
    QuadExp operator-() const { return {-A, -B, -C}; }
    QuadExp scaled(const Exponent& k) const { return {A * k, B * k, C * k}; }
    // product; fails if the result would exceed degree 2
    friend QuadExp mul_checked(const QuadExp& x, const QuadExp& y);

    friend bool operator==(const QuadExp& x, const QuadExp& y) {
        return x.A == y.A && x.B == y.B && x.C == y.C;
    }

    std::string str(const std::string& var) const;
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class ThetaKind { F, QuintQ, FalsePsi, Phi, Psi, Fneg, Chi };
const char* theta_name(ThetaKind k);

struct IntLit {
    Int v;
};
// sign * q^(exp); sign is +1 or -1
struct QMono {
    int sign = 1;
    QuadExp exp;
};
// (base_coeff * q^base_exp) ^ (pow); covers (-1)^n, gamma^n, 0^n
struct PowAtom {
    Int base_coeff;
    Exponent base_exp;
    QuadExp pow;
};
struct BinOp {
    char op; // '+', '-', '*', '/'
    ExprPtr a, b;
};
struct Neg {
    ExprPtr a;
};
// Pochhammer argument: coeff * q^(exp), exp affine in the sum variable.
struct SArg {
    Int coeff;
    QuadExp exp;
};
struct Poch {
    std::vector<SArg> args;
    Exponent base;               // exponent of the base q^s, s > 0
    std::optional<QuadExp> len;  // affine; nullopt = infinite
};
struct Theta {
    ThetaKind kind;
    Monomial a;
    std::optional<Monomial> b;
};
struct Sum {
    std::string var;
    int start; // 0 or 1
    ExprPtr body;
};
// Reference to a catalog entry expression (table-check language only).
struct ExtRef {
    std::string id;
    int idx; // 1-based
};
// Base substitution applied to the evaluated series of the child.
struct Subst {
    ExprPtr a;
    bool neg_q;   // q -> -q
    Exponent pow; // else q -> q^pow
};

using Node = std::variant<IntLit, QMono, PowAtom, BinOp, Neg, Poch, Theta, Sum, ExtRef, Subst>;

struct Expr {
    Node node;
    explicit Expr(Node n) : node(std::move(n)) {}
};

ExprPtr make_expr(Node n);
ExprPtr make_int(Int v);
ExprPtr make_binop(char op, ExprPtr a, ExprPtr b);

// Deterministic text; parse(print_canonical(e)) is structurally equal to e.
std::string print_canonical(const ExprPtr& e);

bool structurally_equal(const ExprPtr& a, const ExprPtr& b);

// Validation at load time: closedness, argument shapes, and for every Sum a
// growing valuation bound.  allow_ext admits ExtRef/Subst nodes.
void validate_expr(const ExprPtr& e, bool allow_ext = false);

// Sound lower bound on the valuation of `summand` evaluated at n.
Exponent sum_valuation_bound(const ExprPtr& summand, std::int64_t n);

} // namespace qidforge

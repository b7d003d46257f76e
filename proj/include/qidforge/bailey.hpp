#pragma once

#include <memory>

#include "qidforge/catalog.hpp"

namespace qidforge {

// A Bailey pair relative to a = q^j: sequences alpha_n, beta_n of rational
// functions of q satisfying beta_n = sum_r alpha_r / ((q)_{n-r} (q^{j+1})_{n+r}).
class BaileyPair {
public:
    virtual ~BaileyPair() = default;
    virtual RationalFunctionQ alpha(std::int64_t n) const = 0;
    virtual RationalFunctionQ beta(std::int64_t n) const = 0;
    virtual int a_exp() const = 0; // j
    virtual std::string id() const = 0;
};

using PairPtr = std::shared_ptr<const BaileyPair>;

enum class LimitCase { PBL, TBL, S1BL, S2BL, FBL };
LimitCase parse_limit_case(const std::string& name);
const char* limit_case_name(LimitCase c);

// rho parameter of the strong Bailey lemma limit: a monomial or "infinity"
// (the (rho)_r / rho^r -> (-1)^r q^{r(r-1)/2} rewrite).
struct Rho {
    bool unbounded = false;
    Monomial value;
    static Rho inf() { return Rho{true, Monomial::one()}; }
    static Rho at(Monomial m) { return Rho{false, std::move(m)}; }
};

// Checks the defining relation for n = 0..n_max at order N.
Verdict verify_pair(const BaileyPair& p, std::int64_t n_max, Exponent N);

// Both sides of the n, rho2 -> infinity case of Bailey's lemma.
std::pair<Series, Series> swbl_apply(const BaileyPair& p, const Rho& rho1, Exponent N);

// The five specializations; TBL replaces q by q^2 after the rho substitution.
std::pair<Series, Series> limit_case(const BaileyPair& p, LimitCase c, Exponent N);

// One Bailey-lemma step: the derived pair (alpha', beta').
PairPtr lemma_step(PairPtr p, const Monomial& rho1, const Monomial& rho2);

PairPtr dual(PairPtr p);

// Entrywise cross-multiplication equality of p and dual(p), n <= n_max.
Verdict check_self_dual(const BaileyPair& p, std::int64_t n_max);
// dual(a) == b entrywise
Verdict check_dual_equal(const BaileyPair& a, const BaileyPair& b, std::int64_t n_max);

class PairSet {
public:
    static PairSet load(const std::string& dir); // reads pairs.cat

    std::vector<std::string> ids() const;
    PairPtr find(const std::string& id) const;
    PairPtr require(const std::string& id) const;
    // "", "true" (strict), or "flip" (self-dual up to q^(1/2) -> -q^(1/2))
    std::string self_dual_mark(const std::string& id) const;
    // declared dual partner (empty when none)
    std::string dual_partner(const std::string& id) const;

    BatchReport verify_pairs(std::int64_t n_max, Exponent N) const;
    // involution for every pair, declared self-duals, declared partner rows
    BatchReport check_duals(std::int64_t n_max) const;

private:
    std::vector<std::string> order_;
    std::map<std::string, PairPtr> pairs_;
    std::map<std::string, std::string> self_dual_;
    std::map<std::string, std::string> dual_of_;
};

// Cross-reference rows linking pair ids to identity tags per limiting case;
// shipped as inert data (most cited pairs are not reprinted here).
struct PairUseRow {
    std::string pair;
    std::map<std::string, std::string> uses; // case name -> comma list of tags
};
std::vector<PairUseRow> load_pair_uses(const std::string& dir);

} // namespace qidforge

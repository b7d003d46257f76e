#pragma once

#include "qidforge/catalog.hpp"

namespace qidforge {

// Parametric two-sided identity verified under monomial specializations.
// Parameter slots appear as $name in the stored texts; integer-typed
// parameters (declared "name:int") take positive integer values.
struct TransformTemplate {
    std::string id;
    std::vector<std::string> params;
    std::vector<std::string> int_params;
    std::string lhs_text, rhs_text;
    std::string note;
};

using Assignment = std::vector<std::pair<std::string, std::string>>;
Assignment parse_assignment(const std::string& text); // "a=q, b=-q^(1/2), k=2"
std::string assignment_str(const Assignment& a);

struct Table2Row {
    std::string id;
    std::string transform;
    Assignment assign;
    std::string left, right;
    std::vector<std::pair<std::string, std::string>> checks; // lhs == rhs
    std::string note;
};

struct Table3Row {
    std::string id;
    std::pair<std::string, std::string> series;  // relation on the series sides
    std::pair<std::string, std::string> product; // relation on the product sides
    std::string note;
};

struct GridSpec {
    std::string transform;
    std::vector<Assignment> assignments;
};

class TransformSet {
public:
    static TransformSet load(const std::string& dir);

    const TransformTemplate* find(const std::string& id) const;
    std::vector<std::string> ids() const;

    // Substitutes the assignment and compares both sides at order N.
    Verdict verify_transform(const std::string& id, const Assignment& assign, Exponent N) const;

    // Declared grids; VanishingFactor specializations are recorded as skipped.
    BatchReport run_grid(const std::string& id, Exponent N) const;
    BatchReport run_grids(const std::string& filter, Exponent N) const;

    BatchReport check_table2(Exponent N, const Catalog& cat) const;
    BatchReport check_table3(Exponent N, const Catalog& cat) const;
    const std::vector<Table2Row>& table2() const { return table2_; }
    const std::vector<Table3Row>& table3() const { return table3_; }

private:
    std::vector<TransformTemplate> templates_;
    std::vector<GridSpec> grids_;
    std::vector<Table2Row> table2_;
    std::vector<Table3Row> table3_;
};

// (-x, -base/x, base; base)_inf against its m-term dissection.
Verdict jtp_dissect(const Monomial& x, std::int64_t m, const Monomial& base, Exponent N);

// Weierstrass relation instance: sum over i of
//   prod_j [a_i/b_j; base] / prod_{j != i} [a_i/a_j; base]  ==  0.
struct WeierstrassInstance {
    std::string id;
    std::vector<Monomial> a, b;
    Monomial base;
};

Verdict weierstrass_check(const WeierstrassInstance& inst, Exponent N);

// [x; base]_inf = (x, base/x; base)_inf with the [1/x] = -1/x [x] rewrite.
Series bracket_inf(const Monomial& x, const Monomial& base, Exponent N);

std::vector<WeierstrassInstance> load_winstances(const std::string& path);

// Generic named checks: blocks with `verify = <catalog id>` and/or
// `relation = lhs == rhs` lines.
BatchReport run_check_file(const std::string& path, Exponent N, const Catalog& cat);

} // namespace qidforge

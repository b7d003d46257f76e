#pragma once

#include <functional>

#include "qidforge/ast.hpp"

namespace qidforge {

struct EvalContext {
    // Resolves @expr(id, idx) references (table-check language).
    std::function<Series(const std::string& id, int idx, Exponent order)> resolver;
};

// Exact expansion of a closed expression to order N (exclusive).
Series eval_series(const ExprPtr& e, Exponent N, const EvalContext& ctx = {});

// Evaluates an expression with free variable n as an exact rational function
// of q (Bailey-pair formulas).  Sums, theta atoms and infinite Pochhammers
// are not rational-function material and are rejected.
RationalFunctionQ eval_rational(const ExprPtr& e, std::int64_t n);

} // namespace qidforge

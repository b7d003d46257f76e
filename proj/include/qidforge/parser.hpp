#pragma once

#include <string>

#include "qidforge/ast.hpp"

namespace qidforge {

struct ParserOptions {
    bool allow_ext = false;    // @expr(...) references and [q->...] substitutions
    bool allow_free_n = false; // free variable "n" outside any sum (pair formulas)
};

// Parses one complete expression; throws ParseError with line/column on failure.
ExprPtr parse_expr(const std::string& text, const ParserOptions& opts = {});

} // namespace qidforge

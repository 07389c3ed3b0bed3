#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "castl/error.hpp"

namespace castl::pddl {

/// Node of a parsed s-expression. Symbols are lower-cased on read.
struct SExpr {
  bool is_list = false;
  std::string symbol;
  std::vector<SExpr> items;
  SourceLocation loc;

  bool is_symbol(std::string_view s) const { return !is_list && symbol == s; }
};

/// Reads every top-level s-expression in `text`. `;` starts a comment.
/// Throws ParseError on lexical errors and unbalanced parentheses.
std::vector<SExpr> read_sexprs(std::string_view text);

}  // namespace castl::pddl

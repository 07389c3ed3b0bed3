#pragma once

#include <map>
#include <string>
#include <vector>

#include "castl/constraints/constraint.hpp"

namespace castl::constraints {

/// Phrase templates for English rendering. `{0}`, `{1}`, ... are replaced by arguments.
/// Predicates and actions without a template fall back to "pred(a, b)".
struct PhraseBook {
  std::map<std::string, std::string> predicates;
  std::map<std::string, std::string> actions;

  std::string atom(const std::string& predicate, const std::vector<std::string>& args) const;
  std::string action(const ActionPattern& pattern) const;
};

/// English rendering of a ground expression.
std::string render_expr_nl(const Expr& e, const PhraseBook& phrases);

/// One English sentence per constraint: eventuals first, then globals, then implications.
std::vector<std::string> render_constraints_nl(const ConstraintSet& set, const PhraseBook& phrases);

}  // namespace castl::constraints

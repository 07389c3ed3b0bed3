#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "castl/constraints/constraint.hpp"
#include "castl/error.hpp"

namespace castl::constraints {

/// Action pattern as written in a script; arguments may still be loop variables.
/// `std::nullopt` is the `*` wildcard.
struct ScriptPattern {
  std::string action;
  std::vector<std::optional<logic::Term>> args;
};

/// One statement of a `.cstl` constraint script.
///
///   block P while E        Block
///   do not P until E       Block, condition not(E)
///   always E               Always
///   never E                Always, condition not(E)
///   goal E                 Goal
///   forall v in SET { .. } Loop
struct Statement {
  enum class Kind { Block, Always, Goal, Loop };

  Kind kind = Kind::Always;
  ScriptPattern pattern;
  Expr expr;
  std::string variable;
  logic::ObjectSet domain;
  std::vector<Statement> body;
  SourceLocation loc;
};

struct Script {
  std::vector<Statement> statements;
};

/// Syntax only. Throws ParseError with line/column.
Script parse_script(std::string_view text);

/// Unrolls loops and turns statements into constraints (unresolved). Loop domains are
/// resolved against the task; unknown sets raise ParseError at the loop's position.
ConstraintSet expand_script(const Script& script, const GroundedTask& task);

/// parse_script + expand_script + resolve_attributes.
ConstraintSet parse_constraint_script(std::string_view text, const GroundedTask& task);

/// Writes a set back as a script; re-parsing the output yields an equivalent set.
std::string write_constraint_script(const ConstraintSet& set);

}  // namespace castl::constraints

#pragma once

#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "castl/logic/expr.hpp"
#include "castl/pddl/grounding.hpp"

namespace castl::constraints {

using logic::Expr;
using pddl::GroundedAction;
using pddl::GroundedTask;

/// An action name plus an argument pattern; `std::nullopt` slots are wildcards (`*`).
struct ActionPattern {
  std::string action;
  std::vector<std::optional<std::string>> args;

  bool matches(const GroundedAction& a) const;
  bool is_concrete() const;
  std::string to_string() const;

  bool operator==(const ActionPattern&) const = default;
};

/// Must hold in the final state. A conjunction of positive/negative atoms.
struct Eventual {
  Expr expr;
  std::string provenance;
};

/// Must hold in every state of the plan, including the initial one.
struct Global {
  Expr expr;
  std::string provenance;
};

/// Actions matching `gate` may only fire at a step whose pre-state falsifies
/// `blocked_while`.
struct Implication {
  ActionPattern gate;
  Expr blocked_while;
  std::string provenance;
};

using Constraint = std::variant<Eventual, Global, Implication>;

struct ConstraintSet {
  std::vector<Eventual> eventuals;
  std::vector<Global> globals;
  std::vector<Implication> implications;
  std::vector<std::string> warnings;

  void add(Constraint c);
  bool empty() const { return eventuals.empty() && globals.empty() && implications.empty(); }
  std::size_t size() const { return eventuals.size() + globals.size() + implications.size(); }
  void append(const ConstraintSet& other);
};

/// One canonical line per constraint, e.g. "global not(holding(b1))". Two resolved sets
/// are equivalent when their key sets are equal; provenance is ignored.
std::set<std::string> canonical_keys(const ConstraintSet& set);
bool equivalent(const ConstraintSet& a, const ConstraintSet& b);

/// Replaces attribute literals and quantifiers by concrete objects, expands wildcard gates
/// into one implication per matching grounded action, folds constants and canonicalises
/// every expression. Universals that become vacuous (and the globals they empty) are
/// dropped with a warning. Idempotent.
///
/// Throws ValidationError for unknown attributes, predicates, objects, gates matching no
/// grounded action, existentials over empty sets, and non-conjunctive eventuals.
ConstraintSet resolve_attributes(const ConstraintSet& set, const GroundedTask& task);

/// Grounded actions matched by `pattern`; throws ValidationError naming the closest
/// alternatives when there are none.
std::vector<pddl::ActionId> expand_pattern(const ActionPattern& pattern, const GroundedTask& task);

/// True when `e` is a conjunction of (possibly negated) atoms.
bool is_literal_conjunction(const Expr& e);

}  // namespace castl::constraints

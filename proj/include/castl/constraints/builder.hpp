#pragma once

#include <string>
#include <vector>

#include "castl/constraints/constraint.hpp"

namespace castl::constraints {

/// Programmatic constraint construction against a grounded task, in the style of a
/// planner scripting API:
///
///   ConstraintBuilder pd(task);
///   std::vector<Expr> visited;
///   for (const auto& room : rooms) visited.push_back(pd.make_grounded_predicate("visited", {"robot1", room}));
///   auto gate = pd.make_action_assignment("move", {"robot1", "living-room", "backyard"});
///   set.add(pd.block_expression_action(gate, pd.make_not(pd.make_and(visited))));
///
/// Every call validates names, arity and objects and throws ValidationError on failure.
class ConstraintBuilder {
 public:
  explicit ConstraintBuilder(const GroundedTask& task) : task_(task) {}

  Expr make_grounded_predicate(const std::string& name, const std::vector<std::string>& args) const;

  static Expr make_and(std::vector<Expr> parts);
  static Expr make_or(std::vector<Expr> parts);
  static Expr make_not(Expr e);
  static Expr make_implies(Expr lhs, Expr rhs);

  /// Arguments may be "*" for wildcard slots.
  ActionPattern make_action_assignment(const std::string& name, const std::vector<std::string>& args) const;

  /// Gated actions may fire only when `condition` is false in the pre-state.
  Implication block_expression_action(const ActionPattern& gate, Expr condition) const;

  /// `condition` must hold in every state.
  Global always(Expr condition) const;

 private:
  const GroundedTask& task_;
};

}  // namespace castl::constraints

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "castl/constraints/constraint.hpp"
#include "castl/planner/plan.hpp"

namespace castl::oracle {

using constraints::ConstraintSet;
using pddl::ActionId;
using pddl::GroundedTask;

enum class ViolationKind { Precondition, Goal, Global, Implication };

std::string to_string(ViolationKind k);

/// `step` is a state index: for precondition and implication violations it is the index
/// of the offending action (its pre-state), for global violations the state that breaks
/// the constraint, for goal violations the final state.
struct Violation {
  std::size_t step = 0;
  ViolationKind kind = ViolationKind::Goal;
  std::string detail;
};

/// Empty optional = valid. Simulates the plan and reports the first violation.
/// At each step i: globals on s_i, then the action's precondition, then implications,
/// then the effects; finally globals on s_n and goal plus eventuals on s_n.
std::optional<Violation> validate(const std::vector<ActionId>& plan, const GroundedTask& task,
                                  const ConstraintSet& constraints);

enum class SearchStatus { Found, NoPlan, Overflow };

struct SearchResult {
  SearchStatus status = SearchStatus::NoPlan;
  int length = -1;                 // optimal makespan when Found
  std::vector<ActionId> plan;      // one optimal plan when Found
  std::size_t expanded = 0;
};

std::string to_string(SearchStatus s);

inline constexpr std::size_t kDefaultStateBudget = 1'000'000;

/// Breadth-first search over states reachable with at most `bound` actions. Only actions
/// whose precondition and implication gates pass are expanded; successors violating a
/// global are pruned (as is the initial state). Overflow is reported when more than
/// `state_budget` states would be expanded.
SearchResult bfs_optimal(const GroundedTask& task, const ConstraintSet& constraints, int bound,
                         std::size_t state_budget = kDefaultStateBudget);

}  // namespace castl::oracle

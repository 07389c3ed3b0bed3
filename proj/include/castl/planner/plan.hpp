#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "castl/pddl/grounding.hpp"

namespace castl::planner {

using pddl::ActionId;
using pddl::GroundedTask;
using logic::State;

using Cell = std::pair<int, int>;

/// A sequential plan with its state trace; states[0] is the initial state and
/// states[i+1] = apply(states[i], steps[i]). `traces` is empty or holds one motion trace
/// per step (empty for steps without motion grounding).
struct Plan {
  std::vector<ActionId> steps;
  std::vector<State> states;
  std::vector<std::vector<Cell>> traces;

  std::size_t makespan() const { return steps.size(); }
};

/// Simulates `steps` from the initial state. Preconditions are not checked here.
Plan make_plan(const GroundedTask& task, std::vector<ActionId> steps);

/// An action written in a plan file, before it is matched against the grounded task.
struct PlanStep {
  std::string action;
  std::vector<std::string> args;
};

/// {"makespan": n, "steps": [{"action": ..., "args": [...], "trace": [[x,y],...]}]}
std::string plan_to_json(const Plan& plan, const GroundedTask& task);
std::string plan_to_text(const Plan& plan, const GroundedTask& task);

/// Accepts the JSON format or one action per line: `(pick-up b1 t1)`, `pick-up b1 t1` or
/// `pick-up(b1, t1)`; `;` and `#` start comments. Throws ParseError.
std::vector<PlanStep> read_plan(std::string_view text);

/// Throws ValidationError naming the first step that is not a grounded action.
std::vector<ActionId> resolve_plan(const std::vector<PlanStep>& steps, const GroundedTask& task);

}  // namespace castl::planner

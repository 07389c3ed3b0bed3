#include "castl/oracle/oracle.hpp"

#include <algorithm>
#include <deque>
#include <unordered_map>

namespace castl::oracle {

using logic::Formula;
using logic::State;

std::string to_string(ViolationKind k) {
  switch (k) {
    case ViolationKind::Precondition: return "precondition";
    case ViolationKind::Goal: return "goal";
    case ViolationKind::Global: return "global";
    case ViolationKind::Implication: return "implication";
  }
  return "?";
}

std::string to_string(SearchStatus s) {
  switch (s) {
    case SearchStatus::Found: return "found";
    case SearchStatus::NoPlan: return "no-plan";
    case SearchStatus::Overflow: return "overflow";
  }
  return "?";
}

namespace {

/// Constraints compiled to id-based formulas and evaluated directly on states,
/// independently of the SAT encoding.
struct Checker {
  using Rule = std::pair<Formula, std::string>;

  const GroundedTask& task;
  std::vector<Rule> globals;
  std::vector<Rule> goal;
  std::vector<std::pair<std::vector<bool>, Rule>> implications;

  Rule rule(const logic::Expr& e) const {
    auto g = task.instantiate(e);
    return {task.compile(g), logic::to_string(g)};
  }

  Checker(const GroundedTask& t, const ConstraintSet& cs) : task(t) {
    for (const auto& g : cs.globals) globals.push_back(rule(g.expr));
    goal.emplace_back(t.goal_formula(), logic::to_string(t.goal()));
    for (const auto& ev : cs.eventuals) goal.push_back(rule(ev.expr));
    for (const auto& im : cs.implications) {
      std::vector<bool> gated(t.actions().size(), false);
      for (std::size_t a = 0; a < t.actions().size(); ++a) gated[a] = im.gate.matches(t.action(static_cast<ActionId>(a)));
      Rule r = rule(im.blocked_while);
      r.second = im.gate.to_string() + " while " + r.second;
      implications.emplace_back(std::move(gated), std::move(r));
    }
  }

  const std::string* failed_global(const State& s) const {
    for (const auto& [f, text] : globals) {
      if (!logic::evaluate(f, s)) return &text;
    }
    return nullptr;
  }

  const std::string* blocking_implication(ActionId a, const State& s) const {
    for (const auto& [gated, r] : implications) {
      if (gated[a] && logic::evaluate(r.first, s)) return &r.second;
    }
    return nullptr;
  }

  const std::string* failed_goal(const State& s) const {
    for (const auto& [f, text] : goal) {
      if (!logic::evaluate(f, s)) return &text;
    }
    return nullptr;
  }

  bool applicable(ActionId a, const State& s) const { return logic::evaluate(task.action(a).pre, s); }
};

}  // namespace

std::optional<Violation> validate(const std::vector<ActionId>& plan, const GroundedTask& task,
                                  const ConstraintSet& constraints) {
  const Checker check(task, constraints);
  State s = task.initial_state();
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (const auto* g = check.failed_global(s)) return Violation{i, ViolationKind::Global, *g};
    const ActionId a = plan[i];
    const auto& act = task.action(a);
    if (!check.applicable(a, s)) {
      return Violation{i, ViolationKind::Precondition, act.label() + " requires " + logic::to_string(act.precondition)};
    }
    if (const auto* rule = check.blocking_implication(a, s)) {
      return Violation{i, ViolationKind::Implication, act.label() + " blocked by " + *rule};
    }
    s = task.apply(s, a);
  }
  if (const auto* g = check.failed_global(s)) return Violation{plan.size(), ViolationKind::Global, *g};
  if (const auto* g = check.failed_goal(s)) return Violation{plan.size(), ViolationKind::Goal, *g};
  return std::nullopt;
}

SearchResult bfs_optimal(const GroundedTask& task, const ConstraintSet& constraints, int bound,
                         std::size_t state_budget) {
  const Checker check(task, constraints);
  SearchResult result;
  const State& init = task.initial_state();
  if (check.failed_global(init) != nullptr) return result;

  struct Node {
    std::size_t parent;
    ActionId action;
    int depth;
  };
  std::vector<Node> nodes;
  std::vector<State> states;
  std::unordered_map<State, std::size_t, logic::StateHash> seen;
  std::deque<std::size_t> frontier;

  nodes.push_back({0, 0, 0});
  states.push_back(init);
  seen.emplace(init, 0);
  frontier.push_back(0);

  while (!frontier.empty()) {
    const std::size_t idx = frontier.front();
    frontier.pop_front();
    const State s = states[idx];
    const int depth = nodes[idx].depth;
    if (check.failed_goal(s) == nullptr) {
      result.status = SearchStatus::Found;
      result.length = depth;
      for (std::size_t k = idx; k != 0; k = nodes[k].parent) result.plan.push_back(nodes[k].action);
      std::reverse(result.plan.begin(), result.plan.end());
      return result;
    }
    if (depth >= bound) continue;
    if (++result.expanded > state_budget) {
      result.status = SearchStatus::Overflow;
      return result;
    }
    for (std::size_t a = 0; a < task.actions().size(); ++a) {
      const auto id = static_cast<ActionId>(a);
      if (!check.applicable(id, s)) continue;
      if (check.blocking_implication(id, s) != nullptr) continue;
      State next = task.apply(s, id);
      if (seen.count(next) != 0) continue;
      if (check.failed_global(next) != nullptr) continue;
      seen.emplace(next, nodes.size());
      nodes.push_back({idx, id, depth + 1});
      states.push_back(std::move(next));
      frontier.push_back(nodes.size() - 1);
    }
  }
  return result;
}

}  // namespace castl::oracle

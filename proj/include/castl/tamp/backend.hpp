#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "castl/constraints/constraint.hpp"
#include "castl/tamp/grid.hpp"

namespace castl::tamp {

using logic::Expr;
using logic::State;
using pddl::ActionId;
using pddl::GroundedTask;

struct CheckResult {
  bool feasible = true;
  std::vector<Cell> trace;
  Expr culprit = Expr::constant(true);  // ground; holds in the failing state

  static CheckResult ok(std::vector<Cell> trace = {}) { return {true, std::move(trace), Expr::constant(true)}; }
  static CheckResult fail(Expr culprit) { return {false, {}, std::move(culprit)}; }
};

/// Grounds task-plan steps in motion. Steps of one candidate plan are checked in order
/// after reset(), each with the symbolic pre-state of that step.
class FeasibilityBackend {
 public:
  virtual ~FeasibilityBackend() = default;
  virtual std::string name() const = 0;
  virtual void reset(const GroundedTask& task) { (void)task; }
  virtual CheckResult check(const GroundedTask& task, ActionId action, const State& state) = 0;
};

/// Conjunction of every fluent atom of `state`, positive or negated.
Expr exact_state_expr(const GroundedTask& task, const State& state);

/// Every step is feasible.
class StubBackend : public FeasibilityBackend {
 public:
  std::string name() const override { return "stub"; }
  CheckResult check(const GroundedTask&, ActionId, const State&) override { return CheckResult::ok(); }
};

/// Fails actions matching a pattern whenever a condition holds; the condition is the culprit.
class ScriptedBackend : public FeasibilityBackend {
 public:
  struct Rule {
    constraints::ActionPattern pattern;
    Expr when;  // may use quantifiers and attributes; instantiated against the task
  };

  ScriptedBackend() = default;
  explicit ScriptedBackend(std::vector<Rule> rules) : rules_(std::move(rules)) {}

  /// {"rules": [{"action": ["pick-up", "block1", "*"], "when": "on_table(block2, table1)"}]}
  /// `when` uses the constraint-script expression syntax and defaults to "true".
  static ScriptedBackend from_json(const nlohmann::json& j);

  void add_rule(Rule r) { rules_.push_back(std::move(r)); }
  std::string name() const override { return "scripted"; }
  CheckResult check(const GroundedTask& task, ActionId action, const State& state) override;

 private:
  std::vector<Rule> rules_;
};

/// Fails a step with probability `percent`/100, decided by hashing (seed, action, state),
/// so the same step in the same state always gets the same answer. Culprit: the exact
/// state. `only_actions` restricts failures to the named action schemas when non-empty.
class RandomFailureBackend : public FeasibilityBackend {
 public:
  RandomFailureBackend(std::uint64_t seed, int percent, std::vector<std::string> only_actions = {});
  std::string name() const override { return "random"; }
  CheckResult check(const GroundedTask& task, ActionId action, const State& state) override;

 private:
  std::uint64_t seed_;
  int percent_;
  std::vector<std::string> only_;
};

/// Grid motion grounding for the house domain. `move(robot, from, to)` runs A* from the
/// robot's cell; the robot cell advances on success. Other actions are feasible with an
/// empty trace. A failure without a blocking door falls back to the exact state.
class GridBackend : public FeasibilityBackend {
 public:
  explicit GridBackend(GridWorld grid, std::string move_action = "move");
  std::string name() const override { return "grid"; }
  void reset(const GroundedTask& task) override;
  CheckResult check(const GroundedTask& task, ActionId action, const State& state) override;

  const GridWorld& grid() const { return grid_; }
  Cell robot_cell() const { return cell_; }

 private:
  GridWorld grid_;
  std::string move_;
  Cell cell_;
};

/// "stub", "grid" (needs scene geometry), "random-fail:PERCENT[,SEED]" or "scripted:FILE".
/// `seed` is used when the random backend spec has none.
std::unique_ptr<FeasibilityBackend> make_backend(const std::string& spec, const GroundedTask& task,
                                                 std::uint64_t seed);

}  // namespace castl::tamp

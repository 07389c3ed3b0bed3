#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "castl/constraints/constraint.hpp"
#include "castl/planner/constraint_stack.hpp"
#include "castl/planner/plan.hpp"
#include "castl/sat/solver.hpp"
#include "castl/util/deadline.hpp"

namespace castl::planner {

using constraints::ConstraintSet;
using logic::Expr;
using logic::Formula;

struct EncodingConfig {
  int max_horizon = 30;
  double timeout = 60.0;  // seconds, shared by every solve() on one Planner
  std::uint64_t seed = 0;
};

enum class SolveStatus { Plan, Infeasible, Timeout };

struct SolveResult {
  SolveStatus status = SolveStatus::Infeasible;
  std::optional<Plan> plan;
  int horizon = 0;      // horizon of the plan, or the last horizon tried
  bool proven = false;  // Infeasible at every horizon, not just up to max_horizon
  sat::SolverStats stats;
};

std::string to_string(SolveStatus s);

/// Bounded-horizon sequential SAT encoding with an increasing horizon and a scoped
/// constraint stack (base domain clauses, task constraints, motion blocks, plan blocks).
///
/// Variables: one per (atom, t) for t in [0, h] and per (action, t) for t in [0, h).
/// Clauses: initial state at 0, precondition at t, effects at t+1, explanatory frame
/// axioms, exactly one action per step, goal and eventuals at h, globals at every t,
/// a@t -> not blocked_while@t for implications.
///
/// The horizon starts at 0 so an already satisfied goal yields the empty plan. solve()
/// resumes from the horizon of the previous answer, which makes block_plan() produce
/// alternative plans of the same or larger makespan.
class Planner {
 public:
  /// `constraints` must already be resolved against `task`.
  Planner(const GroundedTask& task, const ConstraintSet& constraints, EncodingConfig config = {});
  ~Planner();

  Planner(const Planner&) = delete;
  Planner& operator=(const Planner&) = delete;

  /// Uses a deadline that starts at construction with config.timeout seconds.
  SolveResult solve();
  SolveResult solve(const util::Deadline& deadline);

  /// Forbids exactly this action sequence as a complete plan.
  void block_plan(const Plan& plan);

  /// Forbids `action` at every step whose pre-state satisfies `state_expr` (ground).
  void block_action_in_state(ActionId action, const Expr& state_expr);

  const EncodingConfig& config() const { return config_; }
  const util::Deadline& deadline() const { return deadline_; }
  int current_horizon() const { return horizon_; }
  std::size_t num_motion_blocks() const { return motion_blocks_.size(); }
  std::size_t num_plan_blocks() const { return plan_blocks_; }

  ConstraintStack& stack() { return stack_; }
  sat::Solver& solver() { return solver_; }

 private:
  void extend_to(int h);
  void add_state_layer(int t);
  void add_step_layer(int t);
  void add_motion_block(std::size_t block, int t);
  sat::Lit define(const Formula& f, int t);
  sat::Lit goal_lit(int h);
  std::vector<sat::Lit> assumptions(int h, bool with_goal);

  const GroundedTask& task_;
  EncodingConfig config_;
  util::Deadline deadline_;
  sat::Solver solver_;
  ConstraintStack stack_;
  std::size_t task_scope_ = 0;
  std::size_t motion_scope_ = 0;
  std::size_t plan_scope_ = 0;

  sat::Lit true_lit_;
  std::vector<std::vector<sat::Var>> atom_vars_;    // [t][atom]
  std::vector<std::vector<sat::Var>> action_vars_;  // [t][action]
  std::vector<sat::Lit> step_lits_;
  std::vector<std::optional<sat::Lit>> goal_lits_;

  std::vector<std::vector<ActionId>> adders_;
  std::vector<std::vector<ActionId>> deleters_;
  Formula goal_;
  std::vector<Formula> globals_;
  std::vector<std::pair<std::vector<ActionId>, Formula>> implications_;
  std::vector<std::pair<ActionId, Formula>> motion_blocks_;
  std::size_t plan_blocks_ = 0;
  int horizon_ = 0;
};

/// Convenience wrapper: builds a Planner and solves once.
SolveResult solve(const GroundedTask& task, const ConstraintSet& constraints, const EncodingConfig& config = {});

}  // namespace castl::planner

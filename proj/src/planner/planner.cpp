#include "castl/planner/planner.hpp"

#include "castl/error.hpp"

namespace castl::planner {

using sat::Lit;

namespace {

constexpr std::size_t kPairwiseLimit = 16;

}  // namespace

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Plan: return "plan";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Timeout: return "timeout";
  }
  return "?";
}

Planner::Planner(const GroundedTask& task, const ConstraintSet& constraints, EncodingConfig config)
    : task_(task),
      config_(config),
      deadline_(util::Deadline::after(config.timeout)),
      solver_(config.seed),
      stack_(solver_) {
  if (config_.max_horizon < 1) throw ConfigError("max_horizon must be at least 1");
  if (!(config_.timeout > 0)) throw ConfigError("timeout must be positive");

  task_scope_ = stack_.push("task");
  motion_scope_ = stack_.push("motion");
  plan_scope_ = stack_.push("plan");

  true_lit_ = Lit::pos(solver_.new_var());
  solver_.add_clause({true_lit_});

  const std::size_t n_atoms = task_.atoms().size();
  adders_.resize(n_atoms);
  deleters_.resize(n_atoms);
  for (std::size_t a = 0; a < task_.actions().size(); ++a) {
    for (auto p : task_.action(static_cast<ActionId>(a)).add) adders_[p].push_back(static_cast<ActionId>(a));
    for (auto p : task_.action(static_cast<ActionId>(a)).del) deleters_[p].push_back(static_cast<ActionId>(a));
  }

  goal_ = task_.goal_formula();
  if (!constraints.eventuals.empty()) {
    std::vector<Formula> parts{goal_};
    for (const auto& e : constraints.eventuals) parts.push_back(task_.compile(task_.instantiate(e.expr)));
    goal_ = Formula::conjunction(std::move(parts));
  }
  for (const auto& g : constraints.globals) globals_.push_back(task_.compile(task_.instantiate(g.expr)));
  for (const auto& im : constraints.implications) {
    implications_.emplace_back(constraints::expand_pattern(im.gate, task_),
                               task_.compile(task_.instantiate(im.blocked_while)));
  }
}

Planner::~Planner() = default;

Lit Planner::define(const Formula& f, int t) {
  switch (f.op) {
    case Formula::Op::True: return true_lit_;
    case Formula::Op::False: return ~true_lit_;
    case Formula::Op::Lit: return Lit::pos(atom_vars_[static_cast<std::size_t>(t)][f.atom]);
    case Formula::Op::Not: return ~define(f.kids.front(), t);
    case Formula::Op::And:
    case Formula::Op::Or: {
      if (f.kids.size() == 1) return define(f.kids.front(), t);
      std::vector<Lit> kids;
      for (const auto& k : f.kids) kids.push_back(define(k, t));
      const Lit v = Lit::pos(solver_.new_var());
      // And: v <-> all kids. Or is the dual with every literal flipped.
      const bool conj = f.op == Formula::Op::And;
      const Lit vv = conj ? v : ~v;
      std::vector<Lit> back{vv};
      for (Lit k : kids) {
        const Lit kk = conj ? k : ~k;
        solver_.add_clause({~vv, kk});
        back.push_back(~kk);
      }
      solver_.add_clause(std::move(back));
      return v;
    }
  }
  return true_lit_;
}

void Planner::add_state_layer(int t) {
  const std::size_t n = task_.atoms().size();
  std::vector<sat::Var> vars(n);
  for (auto& v : vars) v = solver_.new_var();
  atom_vars_.push_back(std::move(vars));
  goal_lits_.emplace_back();
  if (t == 0) {
    const State& init = task_.initial_state();
    for (std::size_t p = 0; p < n; ++p) {
      stack_.add(0, {Lit::make(atom_vars_[0][p], !init.test(static_cast<logic::AtomId>(p)))});
    }
  }
  for (const auto& g : globals_) stack_.add(task_scope_, {define(g, t)});
}

void Planner::add_step_layer(int t) {
  const auto ts = static_cast<std::size_t>(t);
  const std::size_t n_actions = task_.actions().size();
  std::vector<sat::Var> vars(n_actions);
  for (auto& v : vars) v = solver_.new_var();
  action_vars_.push_back(vars);
  const auto& now = atom_vars_[ts];
  const auto& next = atom_vars_[ts + 1];

  std::vector<logic::AtomId> pos;
  std::vector<logic::AtomId> neg;
  for (std::size_t a = 0; a < n_actions; ++a) {
    const auto& act = task_.action(static_cast<ActionId>(a));
    const Lit y = Lit::pos(vars[a]);
    pos.clear();
    neg.clear();
    if (logic::as_literal_conjunction(act.pre, pos, neg)) {
      for (auto p : pos) stack_.add(0, {~y, Lit::pos(now[p])});
      for (auto p : neg) stack_.add(0, {~y, Lit::neg(now[p])});
    } else {
      stack_.add(0, {~y, define(act.pre, t)});
    }
    for (auto p : act.add) stack_.add(0, {~y, Lit::pos(next[p])});
    for (auto p : act.del) stack_.add(0, {~y, Lit::neg(next[p])});
  }

  // Explanatory frame axioms.
  for (std::size_t p = 0; p < now.size(); ++p) {
    std::vector<Lit> became_true{Lit::pos(now[p]), Lit::neg(next[p])};
    for (ActionId a : adders_[p]) became_true.push_back(Lit::pos(vars[a]));
    stack_.add(0, std::move(became_true));
    std::vector<Lit> became_false{Lit::neg(now[p]), Lit::pos(next[p])};
    for (ActionId a : deleters_[p]) became_false.push_back(Lit::pos(vars[a]));
    stack_.add(0, std::move(became_false));
  }

  // Exactly one action: guarded at-least-one plus at-most-one.
  const Lit step = Lit::pos(solver_.new_var());
  step_lits_.push_back(step);
  std::vector<Lit> alo{~step};
  for (auto v : vars) alo.push_back(Lit::pos(v));
  stack_.add(0, std::move(alo));
  if (n_actions <= kPairwiseLimit) {
    for (std::size_t i = 0; i < n_actions; ++i) {
      for (std::size_t j = i + 1; j < n_actions; ++j) stack_.add(0, {Lit::neg(vars[i]), Lit::neg(vars[j])});
    }
  } else {
    // Sequential counter: s_i is true once some action with index <= i is chosen.
    std::vector<Lit> s(n_actions - 1);
    for (auto& l : s) l = Lit::pos(solver_.new_var());
    for (std::size_t i = 0; i + 1 < n_actions; ++i) {
      stack_.add(0, {Lit::neg(vars[i]), s[i]});
      if (i > 0) {
        stack_.add(0, {~s[i - 1], s[i]});
        stack_.add(0, {Lit::neg(vars[i]), ~s[i - 1]});
      }
    }
    stack_.add(0, {Lit::neg(vars[n_actions - 1]), ~s[n_actions - 2]});
  }

  for (const auto& [ids, cond] : implications_) {
    if (cond.is_false()) continue;
    const Lit blocked = define(cond, t);
    for (ActionId a : ids) stack_.add(task_scope_, {Lit::neg(vars[a]), ~blocked});
  }
  for (std::size_t b = 0; b < motion_blocks_.size(); ++b) add_motion_block(b, t);
}

void Planner::add_motion_block(std::size_t block, int t) {
  const auto& [action, expr] = motion_blocks_[block];
  if (expr.is_false()) return;
  const Lit y = Lit::pos(action_vars_[static_cast<std::size_t>(t)][action]);
  std::vector<logic::AtomId> pos;
  std::vector<logic::AtomId> neg;
  std::vector<Lit> clause{~y};
  if (logic::as_literal_conjunction(expr, pos, neg)) {
    const auto& now = atom_vars_[static_cast<std::size_t>(t)];
    for (auto p : pos) clause.push_back(Lit::neg(now[p]));
    for (auto p : neg) clause.push_back(Lit::pos(now[p]));
  } else {
    clause.push_back(~define(expr, t));
  }
  stack_.add(motion_scope_, std::move(clause));
}

void Planner::extend_to(int h) {
  if (atom_vars_.empty()) add_state_layer(0);
  while (static_cast<int>(atom_vars_.size()) <= h) {
    const int t = static_cast<int>(atom_vars_.size());
    add_state_layer(t);
    add_step_layer(t - 1);
  }
}

Lit Planner::goal_lit(int h) {
  auto& slot = goal_lits_[static_cast<std::size_t>(h)];
  if (!slot) {
    const Lit g = Lit::pos(solver_.new_var());
    stack_.add(0, {~g, define(goal_, h)});
    slot = g;
  }
  return *slot;
}

std::vector<Lit> Planner::assumptions(int h, bool with_goal) {
  std::vector<Lit> out = stack_.assumptions();
  for (int t = 0; t < h; ++t) out.push_back(step_lits_[static_cast<std::size_t>(t)]);
  if (with_goal) out.push_back(goal_lit(h));
  return out;
}

SolveResult Planner::solve() { return solve(deadline_); }

SolveResult Planner::solve(const util::Deadline& deadline) {
  SolveResult result;
  for (int h = horizon_; h <= config_.max_horizon; ++h) {
    result.horizon = h;
    if (deadline.expired()) {
      result.status = SolveStatus::Timeout;
      break;
    }
    extend_to(h);
    const auto answer = solver_.solve(assumptions(h, true), deadline);
    if (answer == sat::Result::Unknown) {
      result.status = SolveStatus::Timeout;
      break;
    }
    if (answer == sat::Result::Sat) {
      std::vector<ActionId> steps;
      for (int t = 0; t < h; ++t) {
        const auto& vars = action_vars_[static_cast<std::size_t>(t)];
        for (std::size_t a = 0; a < vars.size(); ++a) {
          if (solver_.model_value(vars[a])) {
            steps.push_back(static_cast<ActionId>(a));
            break;
          }
        }
      }
      horizon_ = h;
      result.status = SolveStatus::Plan;
      result.plan = make_plan(task_, std::move(steps));
      break;
    }
    // No plan at h. If even the goal-free prefix is unsatisfiable, no larger horizon helps.
    const auto prefix = solver_.solve(assumptions(h, false), deadline);
    if (prefix == sat::Result::Unknown) {
      result.status = SolveStatus::Timeout;
      break;
    }
    horizon_ = std::min(h + 1, config_.max_horizon);
    if (prefix == sat::Result::Unsat) {
      result.status = SolveStatus::Infeasible;
      result.proven = true;
      horizon_ = h;
      break;
    }
    result.status = SolveStatus::Infeasible;
  }
  result.stats = solver_.stats();
  return result;
}

void Planner::block_plan(const Plan& plan) {
  const int k = static_cast<int>(plan.makespan());
  if (k > config_.max_horizon) return;
  extend_to(k);
  std::vector<Lit> clause{~goal_lit(k)};
  for (int t = 0; t < k; ++t) {
    clause.push_back(Lit::neg(action_vars_[static_cast<std::size_t>(t)][plan.steps[static_cast<std::size_t>(t)]]));
  }
  stack_.add(plan_scope_, std::move(clause));
  ++plan_blocks_;
}

void Planner::block_action_in_state(ActionId action, const Expr& state_expr) {
  if (action >= task_.actions().size()) throw ValidationError("unknown grounded action id " + std::to_string(action));
  motion_blocks_.emplace_back(action, task_.compile(task_.instantiate(state_expr)));
  for (int t = 0; t < static_cast<int>(action_vars_.size()); ++t) add_motion_block(motion_blocks_.size() - 1, t);
}

SolveResult solve(const GroundedTask& task, const ConstraintSet& constraints, const EncodingConfig& config) {
  Planner planner(task, constraints, config);
  return planner.solve();
}

}  // namespace castl::planner

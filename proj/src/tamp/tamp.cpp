#include "castl/tamp/tamp.hpp"

#include "castl/error.hpp"

namespace castl::tamp {

TampResult tamp_solve(const GroundedTask& task, const constraints::ConstraintSet& constraints,
                      FeasibilityBackend& backend, const TampConfig& config) {
  if (config.max_iterations < 1) throw ConfigError("max_iterations must be at least 1");
  planner::Planner planner(task, constraints, config.encoding);
  TampResult out;
  while (true) {
    if (out.iterations >= config.max_iterations) {
      out.status = planner::SolveStatus::Timeout;
      out.iteration_limit = true;
      return out;
    }
    auto r = planner.solve();
    out.stats = r.stats;
    if (r.status != planner::SolveStatus::Plan) {
      out.status = r.status;
      return out;
    }
    ++out.iterations;

    planner::Plan plan = std::move(*r.plan);
    plan.traces.clear();
    backend.reset(task);
    bool feasible = true;
    for (std::size_t i = 0; i < plan.steps.size(); ++i) {
      if (planner.deadline().expired()) {
        out.status = planner::SolveStatus::Timeout;
        return out;
      }
      auto check = backend.check(task, plan.steps[i], plan.states[i]);
      if (!check.feasible) {
        out.failures.push_back({out.iterations, static_cast<int>(i), plan.steps[i], check.culprit});
        planner.block_action_in_state(plan.steps[i], check.culprit);
        feasible = false;
        break;
      }
      plan.traces.push_back(std::move(check.trace));
    }
    if (feasible) {
      out.status = planner::SolveStatus::Plan;
      out.plan = std::move(plan);
      return out;
    }
  }
}

}  // namespace castl::tamp

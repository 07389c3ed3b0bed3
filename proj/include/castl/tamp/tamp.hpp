#pragma once

#include <optional>
#include <string>
#include <vector>

#include "castl/planner/planner.hpp"
#include "castl/tamp/backend.hpp"

namespace castl::tamp {

struct TampConfig {
  planner::EncodingConfig encoding;
  int max_iterations = 200;  // candidate task plans before giving up with Timeout
};

/// One rejected step of a candidate plan.
struct MotionFailure {
  int iteration = 0;
  int step = 0;
  ActionId action = 0;
  Expr culprit;
};

struct TampResult {
  planner::SolveStatus status = planner::SolveStatus::Infeasible;
  std::optional<planner::Plan> plan;  // with one motion trace per step
  int iterations = 0;                 // candidate plans produced by the task planner
  bool iteration_limit = false;       // Timeout caused by max_iterations, not the clock
  std::vector<MotionFailure> failures;
  sat::SolverStats stats;
};

/// Task planning with motion feedback: solve, check the steps in order against `backend`,
/// block the first infeasible (action, culprit) pair and re-solve. The encoding timeout
/// covers the whole loop.
TampResult tamp_solve(const GroundedTask& task, const constraints::ConstraintSet& constraints,
                      FeasibilityBackend& backend, const TampConfig& config = {});

}  // namespace castl::tamp

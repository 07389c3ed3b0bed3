#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "castl/constraints/constraint.hpp"
#include "castl/error.hpp"
#include "castl/pddl/grounding.hpp"
#include "castl/pddl/model.hpp"
#include "castl/tamp/grid.hpp"

namespace castl::testing {

std::string fixture_path(const std::string& rel);
std::string read_fixture(const std::string& rel);

struct Loaded {
  pddl::DomainModel domain;
  pddl::SceneDescription scene;
  std::unique_ptr<pddl::GroundedTask> task;
};

/// scene_json may be empty.
std::unique_ptr<Loaded> load_text(const std::string& domain_pddl, const std::string& problem_pddl,
                                  const std::string& scene_json = "");
std::unique_ptr<Loaded> load_fixture(const std::string& domain_rel, const std::string& problem_rel,
                                     const std::string& scene_rel = "");

// Reference oracles. They work on sets of atoms and ground expressions only and share no
// code with the planner, the oracle module or the A* implementation.

struct RefSearch {
  bool overflow = false;
  std::optional<int> length;
  std::vector<pddl::ActionId> plan;
};

/// Shortest constraint-respecting plan of at most `bound` steps.
RefSearch reference_bfs(const pddl::GroundedTask& task, const constraints::ConstraintSet& cs, int bound,
                        std::size_t budget = 300'000);

/// Replays a plan on atom sets. Returns an empty string when every check passes,
/// otherwise "<kind>@<step>".
std::string reference_check(const pddl::GroundedTask& task, const constraints::ConstraintSet& cs,
                            const std::vector<pddl::ActionId>& plan);

/// Unit-cost Dijkstra on the 4-connected grid to any cell within the visit radius of
/// the room's center (squared distance <= 25). -1 when unreachable.
int dijkstra_length(const tamp::GridWorld& grid, planner::Cell start, const std::string& room,
                    const std::function<bool(const logic::GroundedAtom&)>& locked);

/// Random walls, locked and open doors, two rooms; the target room's center is free.
struct RandomGrid {
  tamp::GridWorld grid;
  std::set<logic::GroundedAtom> locked;
  planner::Cell start;
  std::string target;
};
RandomGrid random_grid(std::uint64_t seed);

}  // namespace castl::testing

#include "support.hpp"

#include <deque>
#include <queue>
#include <set>
#include <unordered_map>

#include "castl/pddl/parser.hpp"
#include "castl/pddl/scene.hpp"
#include "castl/util/rng.hpp"
#include "json.hpp"

#ifndef CASTL_FIXTURES_DIR
#define CASTL_FIXTURES_DIR "tests/fixtures"
#endif

namespace castl::testing {

using logic::GroundedAtom;
using AtomSet = std::set<GroundedAtom>;

std::string fixture_path(const std::string& rel) { return std::string(CASTL_FIXTURES_DIR) + "/" + rel; }

std::string read_fixture(const std::string& rel) { return pddl::read_file(fixture_path(rel)); }

std::unique_ptr<Loaded> load_text(const std::string& domain_pddl, const std::string& problem_pddl,
                                  const std::string& scene_json) {
  auto l = std::make_unique<Loaded>();
  l->domain = pddl::parse_domain(domain_pddl);
  l->scene = pddl::parse_problem(problem_pddl, l->domain);
  if (!scene_json.empty()) pddl::apply_scene_json(l->scene, nlohmann::json::parse(scene_json), l->domain);
  l->task = std::make_unique<pddl::GroundedTask>(l->domain, l->scene);
  return l;
}

std::unique_ptr<Loaded> load_fixture(const std::string& domain_rel, const std::string& problem_rel,
                                     const std::string& scene_rel) {
  return load_text(read_fixture(domain_rel), read_fixture(problem_rel),
                   scene_rel.empty() ? std::string() : read_fixture(scene_rel));
}

namespace {

bool eval(const logic::Expr& e, const AtomSet& s) {
  return logic::evaluate(e, [&](const GroundedAtom& a) { return s.count(a) > 0; });
}

bool gate_matches(const constraints::ActionPattern& p, const pddl::GroundedAction& a) {
  if (p.action != a.name || p.args.size() != a.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (p.args[i] && *p.args[i] != a.args[i]) return false;
  }
  return true;
}

AtomSet initial(const pddl::GroundedTask& task) {
  AtomSet s;
  for (auto id : task.initial_state().true_atoms()) s.insert(task.atom(id));
  return s;
}

AtomSet successor(const pddl::GroundedTask& task, const pddl::GroundedAction& a, AtomSet s) {
  for (auto id : a.del) s.erase(task.atom(id));
  for (auto id : a.add) s.insert(task.atom(id));
  return s;
}

bool globals_ok(const constraints::ConstraintSet& cs, const AtomSet& s) {
  for (const auto& g : cs.globals) {
    if (!eval(g.expr, s)) return false;
  }
  return true;
}

bool goal_ok(const pddl::GroundedTask& task, const constraints::ConstraintSet& cs, const AtomSet& s) {
  if (!eval(task.goal(), s)) return false;
  for (const auto& e : cs.eventuals) {
    if (!eval(e.expr, s)) return false;
  }
  return true;
}

bool allowed(const pddl::GroundedTask& task, const constraints::ConstraintSet& cs, const pddl::GroundedAction& a,
             const AtomSet& s, bool* gate_failed = nullptr) {
  (void)task;
  if (!eval(a.precondition, s)) return false;
  for (const auto& imp : cs.implications) {
    if (gate_matches(imp.gate, a) && eval(imp.blocked_while, s)) {
      if (gate_failed != nullptr) *gate_failed = true;
      return false;
    }
  }
  return true;
}

}  // namespace

RefSearch reference_bfs(const pddl::GroundedTask& task, const constraints::ConstraintSet& cs, int bound,
                        std::size_t budget) {
  RefSearch out;
  const AtomSet s0 = initial(task);
  if (!globals_ok(cs, s0)) return out;
  struct Node {
    AtomSet state;
    int depth;
    int parent;
    pddl::ActionId via;
  };
  std::vector<Node> nodes;
  std::set<AtomSet> seen;
  nodes.push_back({s0, 0, -1, 0});
  seen.insert(s0);
  for (std::size_t head = 0; head < nodes.size(); ++head) {
    if (goal_ok(task, cs, nodes[head].state)) {
      out.length = nodes[head].depth;
      for (int i = static_cast<int>(head); nodes[static_cast<std::size_t>(i)].parent >= 0;
           i = nodes[static_cast<std::size_t>(i)].parent) {
        out.plan.insert(out.plan.begin(), nodes[static_cast<std::size_t>(i)].via);
      }
      return out;
    }
    if (nodes[head].depth >= bound) continue;
    if (nodes.size() > budget) {
      out.overflow = true;
      return out;
    }
    for (pddl::ActionId id = 0; id < task.actions().size(); ++id) {
      const auto& a = task.action(id);
      if (!allowed(task, cs, a, nodes[head].state)) continue;
      AtomSet next = successor(task, a, nodes[head].state);
      if (!globals_ok(cs, next) || seen.count(next) > 0) continue;
      seen.insert(next);
      nodes.push_back({std::move(next), nodes[head].depth + 1, static_cast<int>(head), id});
    }
  }
  return out;
}

std::string reference_check(const pddl::GroundedTask& task, const constraints::ConstraintSet& cs,
                            const std::vector<pddl::ActionId>& plan) {
  AtomSet s = initial(task);
  for (std::size_t i = 0; i < plan.size(); ++i) {
    if (!globals_ok(cs, s)) return "global@" + std::to_string(i);
    const auto& a = task.action(plan[i]);
    if (!eval(a.precondition, s)) return "precondition@" + std::to_string(i);
    bool gate = false;
    if (!allowed(task, cs, a, s, &gate) && gate) return "implication@" + std::to_string(i);
    s = successor(task, a, s);
  }
  if (!globals_ok(cs, s)) return "global@" + std::to_string(plan.size());
  if (!goal_ok(task, cs, s)) return "goal@" + std::to_string(plan.size());
  return "";
}

int dijkstra_length(const tamp::GridWorld& grid, planner::Cell start, const std::string& room,
                    const std::function<bool(const GroundedAtom&)>& locked) {
  const auto c = grid.rooms.at(room).center;
  auto blocked = [&](planner::Cell cell) {
    if (!grid.in_bounds(cell) || grid.is_wall(cell)) return true;
    auto it = grid.doors.find(cell);
    return it != grid.doors.end() && locked(it->second);
  };
  auto target = [&](planner::Cell cell) {
    const int dx = cell.first - c.first;
    const int dy = cell.second - c.second;
    return dx * dx + dy * dy <= 25;
  };
  using Item = std::pair<int, planner::Cell>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  std::map<planner::Cell, int> dist;
  dist[start] = 0;
  pq.push({0, start});
  while (!pq.empty()) {
    auto [d, cell] = pq.top();
    pq.pop();
    if (d > dist[cell]) continue;
    if (target(cell)) return d;
    const planner::Cell nbrs[4] = {{cell.first + 1, cell.second},
                                   {cell.first - 1, cell.second},
                                   {cell.first, cell.second + 1},
                                   {cell.first, cell.second - 1}};
    for (const auto& n : nbrs) {
      if (blocked(n)) continue;
      auto it = dist.find(n);
      if (it == dist.end() || d + 1 < it->second) {
        dist[n] = d + 1;
        pq.push({d + 1, n});
      }
    }
  }
  return -1;
}

RandomGrid random_grid(std::uint64_t seed) {
  util::Rng rng(seed);
  RandomGrid out;
  auto& g = out.grid;
  g.width = rng.range(6, 24);
  g.height = rng.range(6, 24);
  const int wall_pct = rng.range(15, 45);
  for (int y = 0; y < g.height; ++y) {
    std::string row;
    for (int x = 0; x < g.width; ++x) row += rng.chance(wall_pct) ? '#' : '.';
    g.rows.push_back(row);
  }
  auto free_cell = [&] {
    planner::Cell c{static_cast<int>(rng.below(static_cast<std::size_t>(g.width))),
                    static_cast<int>(rng.below(static_cast<std::size_t>(g.height)))};
    g.rows[static_cast<std::size_t>(c.second)][static_cast<std::size_t>(c.first)] = '.';
    return c;
  };
  out.start = free_cell();
  g.robot = "robot1";
  g.robot_cell = out.start;
  for (const std::string name : {"ra", "rb"}) {
    tamp::GridWorld::Room room;
    room.center = free_cell();
    room.region = {0, 0, g.width - 1, g.height - 1};
    g.rooms[name] = room;
  }
  out.target = rng.chance(50) ? "ra" : "rb";
  const int doors = rng.range(0, 6);
  for (int i = 0; i < doors; ++i) {
    const planner::Cell c = free_cell();
    if (c == out.start || g.doors.count(c) > 0) continue;
    const logic::GroundedAtom atom{"locked", {"d" + std::to_string(i)}};
    g.doors[c] = atom;
    if (rng.chance(60)) out.locked.insert(atom);
  }
  return out;
}

}  // namespace castl::testing

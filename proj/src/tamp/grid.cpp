#include "castl/tamp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <tuple>

#include "castl/error.hpp"

namespace castl::tamp {

using nlohmann::json;

namespace {

Cell read_cell(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
    throw ConfigError("geometry: " + what + " must be [x, y]");
  }
  return {j[0].get<int>(), j[1].get<int>()};
}

double distance(Cell a, Cell b) {
  const double dx = a.first - b.first;
  const double dy = a.second - b.second;
  return std::sqrt(dx * dx + dy * dy);
}

}  // namespace

GridWorld GridWorld::from_json(const json& g) {
  if (!g.is_object() || !g.contains("grid")) throw ConfigError("geometry: missing \"grid\"");
  GridWorld w;
  try {
    const auto& grid = g.at("grid");
    w.width = grid.at("width").get<int>();
    w.height = grid.at("height").get<int>();
    w.rows = grid.at("rows").get<std::vector<std::string>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("geometry: bad grid: ") + e.what());
  }
  if (w.width <= 0 || w.height <= 0 || static_cast<int>(w.rows.size()) != w.height) {
    throw ConfigError("geometry: grid has " + std::to_string(w.rows.size()) + " rows, expected " +
                      std::to_string(w.height));
  }
  for (const auto& r : w.rows) {
    if (static_cast<int>(r.size()) != w.width) throw ConfigError("geometry: grid row width differs from width");
  }
  auto free_cell = [&](Cell c, const std::string& what) {
    if (!w.in_bounds(c) || w.is_wall(c)) throw ConfigError("geometry: " + what + " is not a free cell");
    return c;
  };

  if (g.contains("rooms")) {
    for (const auto& [name, room] : g.at("rooms").items()) {
      Room r;
      if (!room.contains("center")) throw ConfigError("geometry: room " + name + " has no center");
      r.center = free_cell(read_cell(room.at("center"), "center of " + name), "center of " + name);
      if (room.contains("region")) {
        const auto& reg = room.at("region");
        if (!reg.is_array() || reg.size() != 4) throw ConfigError("geometry: region of " + name + " must be [x0, y0, x1, y1]");
        for (int i = 0; i < 4; ++i) r.region[static_cast<std::size_t>(i)] = reg[static_cast<std::size_t>(i)].get<int>();
      } else {
        r.region = {r.center.first, r.center.second, r.center.first, r.center.second};
      }
      w.rooms[name] = r;
    }
  }
  if (g.contains("doors")) {
    for (const auto& d : g.at("doors")) {
      const Cell c = free_cell(read_cell(d.at("cell"), "door cell"), "door cell");
      const auto& a = d.at("atom");
      if (!a.is_array() || a.empty()) throw ConfigError("geometry: door atom must be [predicate, args...]");
      GroundedAtom atom;
      atom.predicate = a[0].get<std::string>();
      for (std::size_t i = 1; i < a.size(); ++i) atom.args.push_back(a[i].get<std::string>());
      if (!w.doors.emplace(c, atom).second) {
        throw ConfigError("geometry: door cell [" + std::to_string(c.first) + ", " + std::to_string(c.second) +
                          "] listed twice");
      }
    }
  }
  if (g.contains("keys")) {
    for (const auto& [name, k] : g.at("keys").items()) {
      w.keys[name] = free_cell(read_cell(k.at("cell"), "cell of " + name), "cell of " + name);
    }
  }
  if (g.contains("robot")) {
    const auto& r = g.at("robot");
    w.robot = r.value("name", "");
    w.robot_cell = free_cell(read_cell(r.at("cell"), "robot cell"), "robot cell");
  }
  return w;
}

json GridWorld::to_json() const {
  json rooms_j = json::object();
  for (const auto& [name, r] : rooms) {
    rooms_j[name] = {{"center", {r.center.first, r.center.second}}, {"region", r.region}};
  }
  json doors_j = json::array();
  for (const auto& [c, a] : doors) {
    json atom = json::array({a.predicate});
    for (const auto& arg : a.args) atom.push_back(arg);
    doors_j.push_back({{"cell", {c.first, c.second}}, {"atom", atom}});
  }
  json keys_j = json::object();
  for (const auto& [name, c] : keys) keys_j[name] = {{"cell", {c.first, c.second}}};
  return {{"grid", {{"width", width}, {"height", height}, {"rows", rows}}},
          {"rooms", rooms_j},
          {"doors", doors_j},
          {"keys", keys_j},
          {"robot", {{"name", robot}, {"cell", {robot_cell.first, robot_cell.second}}}}};
}

bool within_visit_radius(Cell c, Cell center) {
  // Squared integers avoid rounding at the boundary.
  const long dx = c.first - center.first;
  const long dy = c.second - center.second;
  return dx * dx + dy * dy <= static_cast<long>(kVisitRadius * kVisitRadius);
}

MotionResult astar(const GridWorld& grid, Cell start, const std::string& to_room,
                   const std::function<bool(const GroundedAtom&)>& holds) {
  auto it = grid.rooms.find(to_room);
  if (it == grid.rooms.end()) throw ConfigError("geometry: room '" + to_room + "' has no center");
  const Cell center = it->second.center;
  if (!grid.in_bounds(start)) throw ConfigError("geometry: start cell outside the grid");

  const auto idx = [&](Cell c) { return static_cast<std::size_t>(c.second) * static_cast<std::size_t>(grid.width) +
                                        static_cast<std::size_t>(c.first); };
  // Distance to the disc around the center; consistent for unit steps.
  const auto h = [&](Cell c) { return std::max(0.0, distance(c, center) - kVisitRadius); };

  MotionResult res;
  const std::size_t n = static_cast<std::size_t>(grid.width) * static_cast<std::size_t>(grid.height);
  std::vector<int> g(n, -1);
  std::vector<Cell> parent(n, {-1, -1});
  std::vector<char> closed(n, 0);

  // (f, -g, y, x): deterministic order, deeper nodes first among equal f.
  using Node = std::tuple<double, int, int, int>;
  std::priority_queue<Node, std::vector<Node>, std::greater<>> open;
  g[idx(start)] = 0;
  open.emplace(h(start), 0, start.second, start.first);

  std::optional<std::pair<double, GroundedAtom>> best_door;
  const int dx[4] = {1, 0, -1, 0};
  const int dy[4] = {0, 1, 0, -1};
  while (!open.empty()) {
    const auto [f, neg_g, y, x] = open.top();
    open.pop();
    const Cell c{x, y};
    if (closed[idx(c)]) continue;
    closed[idx(c)] = 1;
    ++res.expanded;
    if (within_visit_radius(c, center)) {
      res.feasible = true;
      for (Cell p = c; p.first >= 0; p = parent[idx(p)]) res.path.push_back(p);
      std::reverse(res.path.begin(), res.path.end());
      return res;
    }
    const int gc = -neg_g;
    for (int d = 0; d < 4; ++d) {
      const Cell nb{x + dx[d], y + dy[d]};
      if (!grid.in_bounds(nb) || grid.is_wall(nb) || closed[idx(nb)]) continue;
      auto door = grid.doors.find(nb);
      if (door != grid.doors.end() && holds(door->second)) {
        const double fd = gc + 1 + h(nb);
        if (!best_door || fd < best_door->first ||
            (fd == best_door->first && logic::to_string(door->second) < logic::to_string(best_door->second))) {
          best_door = std::make_pair(fd, door->second);
        }
        continue;
      }
      if (g[idx(nb)] >= 0 && g[idx(nb)] <= gc + 1) continue;
      g[idx(nb)] = gc + 1;
      parent[idx(nb)] = c;
      open.emplace(gc + 1 + h(nb), -(gc + 1), nb.second, nb.first);
    }
  }
  if (best_door) res.culprit = best_door->second;
  return res;
}

MotionResult astar_check(const GridWorld& grid, Cell robot_cell, const std::string& from_room,
                         const std::string& to_room, const std::function<bool(const GroundedAtom&)>& holds) {
  auto it = grid.rooms.find(from_room);
  if (it == grid.rooms.end()) throw ConfigError("geometry: room '" + from_room + "' has no center");
  if (!it->second.contains(robot_cell) && !within_visit_radius(robot_cell, it->second.center)) {
    throw ConfigError("geometry: robot at [" + std::to_string(robot_cell.first) + ", " +
                      std::to_string(robot_cell.second) + "] is not in " + from_room);
  }
  return astar(grid, robot_cell, to_room, holds);
}

}  // namespace castl::tamp

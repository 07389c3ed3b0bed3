#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "castl/logic/expr.hpp"
#include "castl/planner/plan.hpp"
#include "json.hpp"

namespace castl::tamp {

using logic::GroundedAtom;
using planner::Cell;  // (x, y)

/// Occupancy grid for motion grounding. '#' cells are walls, every other character is
/// free. Door cells are free unless their `locked` atom holds.
struct GridWorld {
  struct Room {
    Cell center;
    std::array<int, 4> region{};  // x0, y0, x1, y1 inclusive

    bool contains(Cell c) const {
      return c.first >= region[0] && c.first <= region[2] && c.second >= region[1] && c.second <= region[3];
    }
  };

  int width = 0;
  int height = 0;
  std::vector<std::string> rows;
  std::map<std::string, Room> rooms;
  std::map<Cell, GroundedAtom> doors;
  std::map<std::string, Cell> keys;
  std::string robot;
  Cell robot_cell{0, 0};

  bool in_bounds(Cell c) const { return c.first >= 0 && c.second >= 0 && c.first < width && c.second < height; }
  bool is_wall(Cell c) const { return rows[static_cast<std::size_t>(c.second)][static_cast<std::size_t>(c.first)] == '#'; }

  /// Parses the `geometry` block of a scene sidecar:
  ///
  ///   {"grid": {"width": W, "height": H, "rows": ["#..#", ...]},
  ///    "rooms": {"r1": {"center": [x, y], "region": [x0, y0, x1, y1]}},
  ///    "doors": [{"cell": [x, y], "atom": ["locked", "r1"]}],
  ///    "keys": {"k1": {"cell": [x, y]}},
  ///    "robot": {"name": "robot1", "cell": [x, y]}}
  ///
  /// Throws ConfigError when the block is malformed, a room center or the robot sits on a
  /// wall, or a door cell appears twice.
  static GridWorld from_json(const nlohmann::json& geometry);
  nlohmann::json to_json() const;
};

/// Radius around a room center within which the room counts as reached (inclusive,
/// Euclidean on cell centers).
inline constexpr double kVisitRadius = 5.0;

bool within_visit_radius(Cell c, Cell center);

struct MotionResult {
  bool feasible = false;
  std::vector<Cell> path;              // start .. goal, so length is path.size() - 1
  std::optional<GroundedAtom> culprit;  // a `locked` atom blocking every route, if any
  std::size_t expanded = 0;
};

/// 4-connected A* from `start` to any cell within kVisitRadius of `to_room`'s center.
/// A door cell is an obstacle while `holds(door atom)` is true. When no path exists the
/// culprit is the locked door with the smallest f-value among those that stopped the
/// search (ties broken by atom name). Throws ConfigError for an unknown room.
MotionResult astar(const GridWorld& grid, Cell start, const std::string& to_room,
                   const std::function<bool(const GroundedAtom&)>& holds);

/// astar() for move(robot, from_room, to_room); the robot must be inside `from_room`'s
/// region or within its visit radius. Throws ConfigError otherwise.
MotionResult astar_check(const GridWorld& grid, Cell robot_cell, const std::string& from_room,
                         const std::string& to_room, const std::function<bool(const GroundedAtom&)>& holds);

}  // namespace castl::tamp

#include "castl/bench/generator.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "castl/constraints/json_format.hpp"
#include "castl/constraints/render.hpp"
#include "castl/constraints/script.hpp"
#include "castl/error.hpp"
#include "castl/oracle/oracle.hpp"
#include "castl/pddl/parser.hpp"
#include "castl/planner/planner.hpp"
#include "castl/pddl/scene.hpp"
#include "castl/util/rng.hpp"
#include "castl/util/strings.hpp"

namespace castl::bench {

namespace {

using logic::Expr;
using logic::GroundedAtom;
using nlohmann::json;
using pddl::SceneDescription;
using util::Rng;

constexpr int kMaxAttempts = 200;
constexpr std::size_t kGenerationStateBudget = 2'000'000;
constexpr double kSatFallbackSeconds = 30.0;

/// A candidate scene plus candidate constraint statements per class.
struct Draft {
  SceneDescription scene;
  std::vector<std::string> impl;
  std::vector<std::string> glob;
  std::vector<std::string> attr;
};

GroundedAtom atom(std::string pred, std::vector<std::string> args) { return {std::move(pred), std::move(args)}; }

Expr conjunction_of(const std::vector<GroundedAtom>& atoms) {
  std::vector<Expr> parts;
  for (const auto& a : atoms) parts.push_back(Expr::atom(a));
  if (parts.size() == 1) return parts.front();
  return Expr::conjunction(std::move(parts));
}

void finish_init(SceneDescription& scene, std::vector<GroundedAtom> init) {
  std::sort(init.begin(), init.end());
  init.erase(std::unique(init.begin(), init.end()), init.end());
  scene.init = std::move(init);
}

std::string num(int i, int width = 1) {
  std::string s = std::to_string(i);
  while (static_cast<int>(s.size()) < width) s.insert(s.begin(), '0');
  return s;
}

// ---------------------------------------------------------------- blocksworld

struct Tower {
  std::string table;
  std::vector<std::string> blocks;  // bottom to top
};

std::vector<Tower> random_towers(Rng& rng, std::vector<std::string> blocks, const std::vector<std::string>& tables) {
  rng.shuffle(blocks);
  std::vector<Tower> towers;
  for (const auto& b : blocks) {
    if (towers.empty() || rng.chance(45)) {
      towers.push_back({rng.pick(tables), {b}});
    } else {
      towers[rng.below(towers.size())].blocks.push_back(b);
    }
  }
  return towers;
}

Draft draft_bw(Rng& rng, Rng& crng, int size) {
  Draft d;
  std::vector<std::string> blocks;
  for (int i = 0; i < size; ++i) blocks.push_back("block" + num(i));
  const std::vector<std::string> tables{"table0", "table1"};
  for (const auto& b : blocks) d.scene.objects.push_back({b, "block"});
  for (const auto& t : tables) d.scene.objects.push_back({t, "table"});

  const auto init_towers = random_towers(rng, blocks, tables);
  std::vector<GroundedAtom> init{atom("arm-empty", {})};
  std::map<std::string, std::string> home_table;
  std::set<GroundedAtom> init_set;
  for (const auto& t : init_towers) {
    init.push_back(atom("on_table", {t.blocks.front(), t.table}));
    for (std::size_t i = 1; i < t.blocks.size(); ++i) init.push_back(atom("on", {t.blocks[i], t.blocks[i - 1]}));
    init.push_back(atom("clear", {t.blocks.back()}));
    for (const auto& b : t.blocks) home_table[b] = t.table;
  }
  init_set.insert(init.begin(), init.end());
  finish_init(d.scene, init);

  std::vector<GroundedAtom> goal;
  for (int tries = 0; tries < 50; ++tries) {
    goal.clear();
    for (const auto& t : random_towers(rng, blocks, tables)) {
      if (rng.chance(50)) goal.push_back(atom("on_table", {t.blocks.front(), t.table}));
      for (std::size_t i = 1; i < t.blocks.size(); ++i) goal.push_back(atom("on", {t.blocks[i], t.blocks[i - 1]}));
    }
    const bool trivial =
        std::all_of(goal.begin(), goal.end(), [&](const GroundedAtom& a) { return init_set.count(a) != 0; });
    if (!goal.empty() && !trivial) break;
  }
  std::sort(goal.begin(), goal.end());
  d.scene.goal = conjunction_of(goal);

  const std::vector<std::string> colors{"red", "blue", "green"};
  for (const auto& b : blocks) d.scene.attributes[rng.pick(colors)].insert(b);

  std::vector<GroundedAtom> on_goals;
  for (const auto& g : goal) {
    if (g.predicate == "on") on_goals.push_back(g);
  }
  std::vector<GroundedAtom> on_init;
  for (const auto& a : d.scene.init) {
    if (a.predicate == "on") on_init.push_back(a);
  }
  auto lit = [](const GroundedAtom& a) { return a.predicate + "(" + util::join(a.args, ", ") + ")"; };

  // Implications: "do not move X until ..." maps to both pick-up and unstack.
  for (int k = 0; k < 4; ++k) {
    const std::string x = crng.pick(blocks);
    std::string cond;
    if (!on_goals.empty() && crng.chance(60)) {
      const auto& g = crng.pick(on_goals);
      if (g.args[0] == x) continue;
      cond = "not(" + lit(g) + ")";
    } else if (!on_init.empty()) {
      const auto& g = crng.pick(on_init);
      if (g.args[0] == x || g.args[1] == x) continue;
      cond = lit(g);
    } else {
      continue;
    }
    if (crng.chance(50)) {
      d.impl.push_back("block pick-up(" + x + ", *) while " + cond);
    } else {
      d.impl.push_back("block pick-up(" + x + ", *) while " + cond + "\nblock unstack(" + x + ", *) while " + cond);
    }
  }
  if (!on_init.empty() && size >= 3) {
    const auto& g = crng.pick(on_init);
    std::vector<std::string> others;
    for (const auto& b : blocks) {
      if (b != g.args[0] && b != g.args[1]) others.push_back(b);
    }
    crng.shuffle(others);
    others.resize(std::min<std::size_t>(others.size(), 2));
    if (!others.empty()) {
      d.impl.push_back("forall b in {" + util::join(others, ", ") + "} {\n  block pick-up(b, *) while " + lit(g) +
                       "\n  block unstack(b, *) while " + lit(g) + "\n}");
    }
  }

  // Globals.
  for (int k = 0; k < 3; ++k) {
    const std::string x = crng.pick(blocks);
    switch (crng.below(3)) {
      case 0:
        d.glob.push_back("never holding(" + x + ")");
        break;
      case 1:
        d.glob.push_back("forall t in table except {" + home_table[x] + "} {\n  never on_table(" + x + ", t)\n}");
        break;
      default: {
        const std::string y = crng.pick(blocks);
        if (y != x) d.glob.push_back("never on(" + x + ", " + y + ")");
      }
    }
  }

  // Attribute-quantified constraints.
  for (const auto& [color, members] : d.scene.attributes) {
    d.attr.push_back("forall b in " + color + " {\n  never holding(b)\n}");
    if (!on_goals.empty()) {
      const auto& g = crng.pick(on_goals);
      d.attr.push_back("forall b in " + color + " {\n  do not pick-up(b, *) until " + lit(g) + "\n}");
    }
  }
  return d;
}

// ---------------------------------------------------------------- housechip

constexpr int kRoomSize = 9;
constexpr int kWall = 2;

Draft draft_hc(Rng& rng, Rng& crng, int size) {
  Draft d;
  std::vector<std::string> rooms;
  for (int i = 0; i < size; ++i) rooms.push_back("room" + num(i, 2));
  d.scene.objects.push_back({"robot1", "robot"});
  for (const auto& r : rooms) d.scene.objects.push_back({r, "room"});
  for (int i = 1; i < size; ++i) d.scene.objects.push_back({"key" + num(i, 2), "key"});

  // Rooms grow as a random tree on a square lattice; a few extra edges add cycles.
  std::vector<std::pair<int, int>> pos{{0, 0}};
  std::map<std::pair<int, int>, int> at;
  at[{0, 0}] = 0;
  std::set<std::pair<int, int>> edges;
  const int dx[4] = {1, -1, 0, 0};
  const int dy[4] = {0, 0, 1, -1};
  std::vector<int> parent(static_cast<std::size_t>(size), -1);
  while (static_cast<int>(pos.size()) < size) {
    const int from = static_cast<int>(rng.below(pos.size()));
    const int dir = static_cast<int>(rng.below(4));
    const std::pair<int, int> p{pos[static_cast<std::size_t>(from)].first + dx[dir],
                                pos[static_cast<std::size_t>(from)].second + dy[dir]};
    if (at.count(p) != 0) continue;
    const int id = static_cast<int>(pos.size());
    at[p] = id;
    pos.push_back(p);
    parent[static_cast<std::size_t>(id)] = from;
    edges.insert({from, id});
  }
  for (const auto& [p, id] : at) {
    for (int dir = 0; dir < 2; ++dir) {
      auto it = at.find({p.first + dx[dir * 2], p.second + dy[dir * 2]});
      if (it == at.end()) continue;
      const std::pair<int, int> e{std::min(id, it->second), std::max(id, it->second)};
      if (edges.count(e) == 0 && rng.chance(25)) edges.insert(e);
    }
  }

  std::vector<GroundedAtom> init{atom("at", {"robot1", rooms[0]}), atom("visited", {"robot1", rooms[0]})};
  std::vector<int> key_room(static_cast<std::size_t>(size), 0);
  for (int i = 1; i < size; ++i) {
    const std::string k = "key" + num(i, 2);
    init.push_back(atom("locked", {rooms[static_cast<std::size_t>(i)]}));
    init.push_back(atom("opens", {k, rooms[static_cast<std::size_t>(i)]}));
    // The key lies in a room created earlier, hence reachable without it.
    key_room[static_cast<std::size_t>(i)] = static_cast<int>(rng.below(static_cast<std::size_t>(i)));
    init.push_back(atom("key-in", {k, rooms[static_cast<std::size_t>(key_room[static_cast<std::size_t>(i)])]}));
  }
  for (const auto& [a, b] : edges) {
    init.push_back(atom("connected", {rooms[static_cast<std::size_t>(a)], rooms[static_cast<std::size_t>(b)]}));
    init.push_back(atom("connected", {rooms[static_cast<std::size_t>(b)], rooms[static_cast<std::size_t>(a)]}));
  }
  finish_init(d.scene, init);

  std::vector<std::string> others(rooms.begin() + 1, rooms.end());
  rng.shuffle(others);
  const int k_goal = rng.range(std::min(2, size - 1), size - 1);
  std::vector<std::string> goal_rooms(others.begin(), others.begin() + k_goal);
  std::sort(goal_rooms.begin(), goal_rooms.end());
  std::vector<GroundedAtom> goal;
  for (const auto& r : goal_rooms) goal.push_back(atom("visited", {"robot1", r}));
  d.scene.goal = conjunction_of(goal);

  // Attributes.
  for (const char* attr : {"has-bed", "dirty"}) {
    for (const auto& r : others) {
      if (rng.chance(35)) d.scene.attributes[attr].insert(r);
    }
    if (d.scene.attributes[attr].empty()) d.scene.attributes[attr].insert(rng.pick(others));
  }

  // Geometry: 9x9 rooms separated by 2-cell walls; each opening is two door cells,
  // the one next to a room keyed to that room's lock.
  int min_x = 0;
  int min_y = 0;
  int max_x = 0;
  int max_y = 0;
  for (const auto& [x, y] : pos) {
    min_x = std::min(min_x, x);
    min_y = std::min(min_y, y);
    max_x = std::max(max_x, x);
    max_y = std::max(max_y, y);
  }
  const int pitch = kRoomSize + kWall;
  const int width = kWall + (max_x - min_x + 1) * pitch;
  const int height = kWall + (max_y - min_y + 1) * pitch;
  std::vector<std::string> grid(static_cast<std::size_t>(height), std::string(static_cast<std::size_t>(width), '#'));
  auto origin = [&](int id) {
    const auto& p = pos[static_cast<std::size_t>(id)];
    return std::pair<int, int>{kWall + (p.first - min_x) * pitch, kWall + (p.second - min_y) * pitch};
  };
  json geo_rooms = json::object();
  for (int i = 0; i < size; ++i) {
    const auto [ox, oy] = origin(i);
    for (int y = oy; y < oy + kRoomSize; ++y) {
      for (int x = ox; x < ox + kRoomSize; ++x) grid[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)] = '.';
    }
    geo_rooms[rooms[static_cast<std::size_t>(i)]] = {
        {"center", {ox + kRoomSize / 2, oy + kRoomSize / 2}},
        {"region", {ox, oy, ox + kRoomSize - 1, oy + kRoomSize - 1}}};
  }
  json doors = json::array();
  for (const auto& [a, b] : edges) {
    const auto [ax, ay] = origin(a);
    const auto [bx, by] = origin(b);
    std::pair<int, int> ca;
    std::pair<int, int> cb;
    if (ay == by) {
      const int y = ay + kRoomSize / 2;
      const bool a_left = ax < bx;
      const int wall_x = (a_left ? ax : bx) + kRoomSize;
      ca = {a_left ? wall_x : wall_x + 1, y};
      cb = {a_left ? wall_x + 1 : wall_x, y};
    } else {
      const int x = ax + kRoomSize / 2;
      const bool a_top = ay < by;
      const int wall_y = (a_top ? ay : by) + kRoomSize;
      ca = {x, a_top ? wall_y : wall_y + 1};
      cb = {x, a_top ? wall_y + 1 : wall_y};
    }
    for (const auto& [cell, room] : {std::pair{ca, a}, std::pair{cb, b}}) {
      grid[static_cast<std::size_t>(cell.second)][static_cast<std::size_t>(cell.first)] = '.';
      doors.push_back({{"cell", {cell.first, cell.second}}, {"atom", {"locked", rooms[static_cast<std::size_t>(room)]}}});
    }
  }
  json keys = json::object();
  for (int i = 1; i < size; ++i) {
    const auto [ox, oy] = origin(key_room[static_cast<std::size_t>(i)]);
    keys["key" + num(i, 2)] = {{"cell", {ox + rng.range(1, kRoomSize - 2), oy + rng.range(1, kRoomSize - 2)}}};
  }
  const auto [sx, sy] = origin(0);
  d.scene.geometry = json{{"grid", {{"width", width}, {"height", height}, {"rows", grid}}},
                          {"rooms", geo_rooms},
                          {"doors", doors},
                          {"keys", keys},
                          {"robot", {{"name", "robot1"}, {"cell", {sx + kRoomSize / 2, sy + kRoomSize / 2}}}}};

  // Implications: visiting order and key pickup order.
  for (int k = 0; k < 4; ++k) {
    const std::string b = crng.pick(goal_rooms);
    const std::string a = crng.pick(others);
    if (a == b) continue;
    if (crng.chance(70)) {
      d.impl.push_back("do not move(robot1, *, " + b + ") until visited(robot1, " + a + ")");
    } else {
      const std::string key = "key" + b.substr(4);
      d.impl.push_back("do not pick-key(robot1, " + key + ", *) until visited(robot1, " + a + ")");
    }
  }
  // Globals: forbidden rooms and keys.
  std::vector<std::string> spare_rooms;
  for (const auto& r : others) {
    if (!std::binary_search(goal_rooms.begin(), goal_rooms.end(), r)) spare_rooms.push_back(r);
  }
  for (int k = 0; k < 3 && !spare_rooms.empty(); ++k) {
    const std::string r = crng.pick(spare_rooms);
    if (crng.chance(60)) {
      d.glob.push_back("never visited(robot1, " + r + ")");
    } else {
      d.glob.push_back("never holding-key(robot1, key" + r.substr(4) + ")");
    }
  }
  d.attr.push_back("forall r in dirty {\n  never visited(robot1, r)\n}");
  d.attr.push_back("forall r in has-bed {\n  do not move(robot1, *, r) until visited(robot1, " + crng.pick(others) +
                   ")\n}");
  return d;
}

// ---------------------------------------------------------------- kitchen

Draft draft_kt(Rng& rng, Rng& crng, int size, int tier) {
  Draft d;
  const int n_trays = tier == 1 ? 1 : 2;
  std::vector<std::string> children;
  std::vector<std::string> breads;
  std::vector<std::string> contents;
  std::vector<std::string> sandwiches;
  std::vector<std::string> trays;
  const std::vector<std::string> tables{"table1", "table2"};
  for (int i = 1; i <= size; ++i) children.push_back("child" + num(i));
  // Tier 2 gets no spare ingredients: each spare one multiplies the reachable states.
  const int spare = tier == 1 ? 1 : 0;
  for (int i = 1; i <= size + spare; ++i) breads.push_back("bread" + num(i));
  for (int i = 1; i <= size + spare; ++i) contents.push_back("content" + num(i));
  for (int i = 1; i <= size; ++i) sandwiches.push_back("sandw" + num(i));
  for (int i = 1; i <= n_trays; ++i) trays.push_back("tray" + num(i));
  for (const auto& c : children) d.scene.objects.push_back({c, "child"});
  for (const auto& b : breads) d.scene.objects.push_back({b, "bread"});
  for (const auto& c : contents) d.scene.objects.push_back({c, "content"});
  for (const auto& s : sandwiches) d.scene.objects.push_back({s, "sandwich"});
  for (const auto& t : trays) d.scene.objects.push_back({t, "tray"});
  for (const auto& t : tables) d.scene.objects.push_back({t, "place"});

  std::vector<GroundedAtom> init;
  std::set<std::string> allergic;
  for (const auto& c : children) {
    if (rng.chance(40)) allergic.insert(c);
    init.push_back(atom(allergic.count(c) ? "allergic_gluten" : "not_allergic_gluten", {c}));
    init.push_back(atom("waiting", {c, rng.pick(tables)}));
  }
  const int gluten_free = static_cast<int>(allergic.size()) + spare;
  for (int i = 0; i < size + spare; ++i) {
    init.push_back(atom("at_kitchen_bread", {breads[static_cast<std::size_t>(i)]}));
    init.push_back(atom("at_kitchen_content", {contents[static_cast<std::size_t>(i)]}));
    if (i < gluten_free) {
      init.push_back(atom("no_gluten_bread", {breads[static_cast<std::size_t>(i)]}));
      init.push_back(atom("no_gluten_content", {contents[static_cast<std::size_t>(i)]}));
    }
  }
  for (const auto& s : sandwiches) init.push_back(atom("notexist", {s}));
  for (const auto& t : trays) init.push_back(atom("at", {t, "kitchen"}));
  finish_init(d.scene, init);

  std::vector<std::string> served = children;
  rng.shuffle(served);
  served.resize(static_cast<std::size_t>(rng.range(std::max(1, size - 1), size)));
  std::sort(served.begin(), served.end());
  std::vector<GroundedAtom> goal;
  for (const auto& c : served) goal.push_back(atom("served", {c}));
  d.scene.goal = conjunction_of(goal);

  for (const auto& b : breads) {
    if (rng.chance(25)) d.scene.attributes["stale"].insert(b);
  }
  for (const auto& c : contents) {
    if (rng.chance(25)) d.scene.attributes["spicy"].insert(c);
  }
  if (d.scene.attributes["stale"].empty()) d.scene.attributes["stale"].insert(rng.pick(breads));
  if (d.scene.attributes["spicy"].empty()) d.scene.attributes["spicy"].insert(rng.pick(contents));

  auto serve_action = [&](const std::string& child) {
    return allergic.count(child) ? std::string("serve_sandwich_no_gluten") : std::string("serve_sandwich");
  };

  // Implications: delivery order, or preparing every sandwich before serving.
  for (int k = 0; k < 3; ++k) {
    const std::string b = crng.pick(served);
    const std::string a = crng.pick(children);
    if (a == b) continue;
    d.impl.push_back("do not " + serve_action(b) + "(*, " + b + ", *, *) until served(" + a + ")");
  }
  {
    std::string stmt = "forall s in sandwich {";
    if (static_cast<int>(allergic.size()) < size) stmt += "\n  block serve_sandwich(*, *, *, *) while notexist(s)";
    if (!allergic.empty()) stmt += "\n  block serve_sandwich_no_gluten(*, *, *, *) while notexist(s)";
    d.impl.push_back(stmt + "\n}");
  }
  // Globals: banned ingredients and trays.
  for (int k = 0; k < 2; ++k) {
    if (crng.chance(50)) {
      d.glob.push_back("always at_kitchen_bread(" + crng.pick(breads) + ")");
    } else {
      d.glob.push_back("always at_kitchen_content(" + crng.pick(contents) + ")");
    }
  }
  if (n_trays > 1) d.glob.push_back("forall s in sandwich {\n  never ontray(s, " + trays.back() + ")\n}");
  d.attr.push_back("forall b in stale {\n  always at_kitchen_bread(b)\n}");
  d.attr.push_back("forall c in spicy {\n  always at_kitchen_content(c)\n}");
  return d;
}

// ---------------------------------------------------------------- assembly

std::vector<std::string> choose(Rng& rng, std::vector<std::string> pool, int lo, int hi) {
  if (pool.empty()) return {};
  rng.shuffle(pool);
  const int k = std::min(static_cast<int>(pool.size()), rng.range(lo, hi));
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

bool has_impl(Profile p) { return p == Profile::Impl || p == Profile::ImplGlob || p == Profile::ImplGlobAttr; }
bool has_glob(Profile p) { return p == Profile::Glob || p == Profile::ImplGlob || p == Profile::ImplGlobAttr; }

const pddl::DomainModel& domain_model(Domain d) {
  static const pddl::DomainModel hc = pddl::parse_domain(domain_pddl(Domain::HC));
  static const pddl::DomainModel kt = pddl::parse_domain(domain_pddl(Domain::KT));
  static const pddl::DomainModel bw = pddl::parse_domain(domain_pddl(Domain::BW));
  switch (d) {
    case Domain::HC: return hc;
    case Domain::KT: return kt;
    case Domain::BW: return bw;
  }
  return bw;
}

json sidecar_of(const SceneDescription& scene) {
  json out = json::object();
  json attrs = json::object();
  for (const auto& [name, members] : scene.attributes) attrs[name] = std::vector<std::string>(members.begin(), members.end());
  out["attributes"] = attrs;
  if (scene.geometry) out["geometry"] = *scene.geometry;
  return out;
}

std::string write_file_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
  return p.string();
}

}  // namespace

std::string to_string(Profile p) {
  switch (p) {
    case Profile::No: return "no";
    case Profile::Impl: return "impl";
    case Profile::Glob: return "glob";
    case Profile::ImplGlob: return "implglob";
    case Profile::ImplGlobAttr: return "implglobattr";
  }
  return "?";
}

Profile parse_profile(std::string_view name) {
  const std::string n = util::to_lower(std::string(name));
  for (Profile p : all_profiles()) {
    if (to_string(p) == n) return p;
  }
  throw ConfigError("unknown constraint profile '" + std::string(name) +
                    "' (expected no, impl, glob, implglob or implglobattr)");
}

const std::vector<Profile>& all_profiles() {
  static const std::vector<Profile> all{Profile::No, Profile::Impl, Profile::Glob, Profile::ImplGlob,
                                        Profile::ImplGlobAttr};
  return all;
}

TierSpec tier_spec(Domain d, int tier) {
  if (tier != 1 && tier != 2) throw ConfigError("tier must be 1 or 2");
  switch (d) {
    case Domain::BW: return tier == 1 ? TierSpec{3, 4, 30} : TierSpec{5, 6, 30};
    case Domain::HC: return tier == 1 ? TierSpec{4, 5, 30} : TierSpec{6, 7, 30};
    case Domain::KT: return tier == 1 ? TierSpec{2, 3, 30} : TierSpec{4, 4, 30};
  }
  return {};
}

Instance generate(Domain domain, int tier, Profile profile, std::uint64_t seed) {
  const TierSpec spec = tier_spec(domain, tier);
  const auto& model = domain_model(domain);
  Instance inst;
  inst.domain = domain;
  inst.tier = tier;
  inst.profile = profile;
  inst.seed = seed;
  inst.name = to_string(domain) + "-t" + std::to_string(tier) + "-" + to_string(profile) + "-s" + std::to_string(seed);
  inst.domain_pddl = std::string(domain_pddl(domain));

  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    // Scene randomness is shared by all profiles of a seed; constraint choice is not.
    Rng rng(util::mix_seed({static_cast<std::uint64_t>(domain), static_cast<std::uint64_t>(tier), seed,
                            static_cast<std::uint64_t>(attempt)}));
    Rng crng(util::mix_seed({static_cast<std::uint64_t>(domain), static_cast<std::uint64_t>(tier), seed,
                             static_cast<std::uint64_t>(attempt), 0xc0ffeeULL + static_cast<std::uint64_t>(profile)}));
    const int size = rng.range(spec.min_size, spec.max_size);
    Draft d;
    switch (domain) {
      case Domain::BW: d = draft_bw(rng, crng, size); break;
      case Domain::HC: d = draft_hc(rng, crng, size); break;
      case Domain::KT: d = draft_kt(rng, crng, size, tier); break;
    }
    d.scene.name = inst.name;
    d.scene.domain_name = model.name;

    std::vector<std::string> statements;
    if (has_impl(profile)) {
      for (auto& s : choose(crng, d.impl, 1, profile == Profile::Impl ? 2 : 1)) statements.push_back(s);
    }
    if (has_glob(profile)) {
      for (auto& s : choose(crng, d.glob, 1, profile == Profile::Glob ? 2 : 1)) statements.push_back(s);
    }
    if (profile == Profile::ImplGlobAttr) {
      for (auto& s : choose(crng, d.attr, 1, 1)) statements.push_back(s);
    }

    // Round-trip everything through the public parsers so the files are what is checked.
    const std::string problem = pddl::print_problem(d.scene);
    const json sidecar = sidecar_of(d.scene);
    std::string script = "# " + inst.name + "\n";
    for (const auto& s : statements) script += s + "\n";

    pddl::SceneDescription parsed = pddl::parse_problem(problem, model);
    pddl::apply_scene_json(parsed, sidecar, model);
    const pddl::GroundedTask task(model, parsed);
    constraints::ConstraintSet resolved;
    try {
      resolved = constraints::parse_constraint_script(script, task);
    } catch (const Error&) {
      continue;  // e.g. a gate that matches no grounded action in this scene
    }
    if (has_impl(profile) && resolved.implications.empty()) continue;
    if (has_glob(profile) && resolved.globals.empty()) continue;

    // Breadth-first search is exact; the SAT planner takes over when the state space is
    // too large for it. Its horizon grows one step at a time, so its first plan is also
    // of optimal length.
    int optimal = -1;
    std::string oracle_name = "bfs";
    const auto search = oracle::bfs_optimal(task, resolved, spec.bound, kGenerationStateBudget);
    if (search.status == oracle::SearchStatus::Found) {
      optimal = search.length;
    } else if (search.status == oracle::SearchStatus::Overflow) {
      planner::EncodingConfig cfg;
      cfg.max_horizon = spec.bound;
      cfg.timeout = kSatFallbackSeconds;
      const auto r = planner::solve(task, resolved, cfg);
      if (r.status == planner::SolveStatus::Plan) optimal = r.plan->makespan();
      oracle_name = "sat";
    }
    if (optimal <= 0) continue;

    inst.attempts = attempt + 1;
    inst.optimal_makespan = optimal;
    inst.problem_pddl = problem;
    inst.scene_json = sidecar.dump(2) + "\n";
    inst.constraints_cstl = script;
    inst.constraints_json = constraints::write_constraint_json(resolved);

    const auto& book = phrases(domain);
    std::string prompt = "In the end, " + constraints::render_expr_nl(task.goal(), book) + ".\n";
    for (const auto& line : constraints::render_constraints_nl(resolved, book)) prompt += line + "\n";
    inst.nl_prompt = prompt;

    json truth = json::object();
    truth["name"] = inst.name;
    truth["domain"] = to_string(domain);
    truth["tier"] = tier;
    truth["profile"] = to_string(profile);
    truth["seed"] = seed;
    truth["attempts"] = inst.attempts;
    truth["bound"] = spec.bound;
    truth["oracle"] = oracle_name;
    truth["optimal_makespan"] = optimal;
    truth["goal"] = pddl::print_pddl_expr(parsed.goal);
    json keys = json::array();
    for (const auto& k : constraints::canonical_keys(resolved)) keys.push_back(k);
    truth["constraints"] = keys;
    truth["counts"] = {{"eventual", resolved.eventuals.size()},
                       {"global", resolved.globals.size()},
                       {"implication", resolved.implications.size()}};
    inst.ground_truth_json = truth.dump(2) + "\n";
    return inst;
  }
  throw Error("no solvable instance for " + inst.name + " within " + std::to_string(kMaxAttempts) + " attempts");
}

void write_instance(const Instance& inst, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file_text(dir / "domain.pddl", inst.domain_pddl);
  write_file_text(dir / "problem.pddl", inst.problem_pddl);
  write_file_text(dir / "scene.json", inst.scene_json);
  write_file_text(dir / "constraints.cstl", inst.constraints_cstl);
  write_file_text(dir / "constraints.json", inst.constraints_json);
  write_file_text(dir / "nl_prompt.txt", inst.nl_prompt);
  write_file_text(dir / "ground_truth.json", inst.ground_truth_json);
}

}  // namespace castl::bench

#include "castl/tamp/backend.hpp"

#include <algorithm>

#include "castl/constraints/script.hpp"
#include "castl/error.hpp"
#include "castl/pddl/parser.hpp"
#include "castl/util/rng.hpp"

namespace castl::tamp {

using nlohmann::json;

Expr exact_state_expr(const GroundedTask& task, const State& state) {
  std::vector<Expr> lits;
  lits.reserve(task.atoms().size());
  for (std::size_t i = 0; i < task.atoms().size(); ++i) {
    Expr a = Expr::atom(task.atoms()[i]);
    lits.push_back(state.test(static_cast<logic::AtomId>(i)) ? a : Expr::negate(a));
  }
  if (lits.empty()) return Expr::constant(true);
  return Expr::conjunction(std::move(lits));
}

ScriptedBackend ScriptedBackend::from_json(const json& j) {
  ScriptedBackend b;
  if (!j.is_object() || !j.contains("rules") || !j.at("rules").is_array()) {
    throw ConfigError("scripted backend: expected {\"rules\": [...]}");
  }
  for (const auto& r : j.at("rules")) {
    const auto& act = r.at("action");
    if (!act.is_array() || act.empty()) throw ConfigError("scripted backend: \"action\" must be [name, args...]");
    Rule rule;
    rule.pattern.action = act[0].get<std::string>();
    for (std::size_t i = 1; i < act.size(); ++i) {
      const auto a = act[i].get<std::string>();
      rule.pattern.args.push_back(a == "*" ? std::nullopt : std::optional<std::string>(a));
    }
    const std::string when = r.value("when", "true");
    const auto script = constraints::parse_script("always " + when);
    if (script.statements.size() != 1) throw ConfigError("scripted backend: bad condition '" + when + "'");
    rule.when = script.statements.front().expr;
    b.add_rule(std::move(rule));
  }
  return b;
}

CheckResult ScriptedBackend::check(const GroundedTask& task, ActionId action, const State& state) {
  const auto& act = task.action(action);
  for (const auto& rule : rules_) {
    if (!rule.pattern.matches(act)) continue;
    const Expr cond = task.instantiate(rule.when);
    if (logic::evaluate(cond, [&](const GroundedAtom& a) { return task.holds(state, a); })) {
      return CheckResult::fail(cond);
    }
  }
  return CheckResult::ok();
}

RandomFailureBackend::RandomFailureBackend(std::uint64_t seed, int percent, std::vector<std::string> only_actions)
    : seed_(seed), percent_(percent), only_(std::move(only_actions)) {
  if (percent < 0 || percent > 100) throw ConfigError("random backend: failure percent must be in [0, 100]");
}

CheckResult RandomFailureBackend::check(const GroundedTask& task, ActionId action, const State& state) {
  const auto& act = task.action(action);
  if (!only_.empty() && std::find(only_.begin(), only_.end(), act.name) == only_.end()) return CheckResult::ok();
  std::uint64_t h = util::mix_seed({seed_, action});
  for (auto w : state.words()) h = util::mix_seed({h, w});
  if (static_cast<int>(h % 100) < percent_) return CheckResult::fail(exact_state_expr(task, state));
  return CheckResult::ok();
}

GridBackend::GridBackend(GridWorld grid, std::string move_action)
    : grid_(std::move(grid)), move_(std::move(move_action)), cell_(grid_.robot_cell) {}

void GridBackend::reset(const GroundedTask&) { cell_ = grid_.robot_cell; }

CheckResult GridBackend::check(const GroundedTask& task, ActionId action, const State& state) {
  const auto& act = task.action(action);
  if (act.name != move_ || act.args.size() != 3) return CheckResult::ok();
  if (!grid_.robot.empty() && act.args[0] != grid_.robot) return CheckResult::ok();
  const auto res = astar_check(grid_, cell_, act.args[1], act.args[2],
                               [&](const GroundedAtom& a) { return task.holds(state, a); });
  if (res.feasible) {
    cell_ = res.path.back();
    return CheckResult::ok(res.path);
  }
  if (res.culprit) return CheckResult::fail(Expr::atom(*res.culprit));
  return CheckResult::fail(exact_state_expr(task, state));
}

std::unique_ptr<FeasibilityBackend> make_backend(const std::string& spec, const GroundedTask& task,
                                                 std::uint64_t seed) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : spec.substr(colon + 1);
  if (kind == "stub") return std::make_unique<StubBackend>();
  if (kind == "grid") {
    if (!task.scene().geometry) throw ConfigError("grid backend needs a scene with a \"geometry\" block");
    return std::make_unique<GridBackend>(GridWorld::from_json(*task.scene().geometry));
  }
  if (kind == "random-fail") {
    // random-fail:PERCENT[,SEED]
    int pct = 20;
    std::uint64_t rseed = seed;
    try {
      const auto comma = arg.find(',');
      if (!arg.empty()) pct = std::stoi(arg.substr(0, comma));
      if (comma != std::string::npos) rseed = std::stoull(arg.substr(comma + 1));
    } catch (const std::exception&) {
      throw ConfigError("random-fail backend: expected random-fail:PERCENT[,SEED], got '" + spec + "'");
    }
    return std::make_unique<RandomFailureBackend>(rseed, pct);
  }
  if (kind == "scripted") {
    if (arg.empty()) throw ConfigError("scripted backend needs a rules file: scripted:FILE");
    json j;
    try {
      j = json::parse(pddl::read_file(arg));
    } catch (const json::exception& e) {
      throw ConfigError("scripted backend: " + arg + ": " + e.what());
    }
    return std::make_unique<ScriptedBackend>(ScriptedBackend::from_json(j));
  }
  throw ConfigError("unknown backend '" + spec + "' (expected stub, grid, random-fail:PERCENT[,SEED] or scripted:FILE)");
}

}  // namespace castl::tamp

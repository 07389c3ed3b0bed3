#include "castl/planner/plan.hpp"

#include <sstream>

#include "castl/error.hpp"
#include "castl/util/strings.hpp"
#include "json.hpp"

namespace castl::planner {

using nlohmann::json;

Plan make_plan(const GroundedTask& task, std::vector<ActionId> steps) {
  Plan plan;
  plan.states.push_back(task.initial_state());
  for (ActionId a : steps) plan.states.push_back(task.apply(plan.states.back(), a));
  plan.steps = std::move(steps);
  return plan;
}

std::string plan_to_json(const Plan& plan, const GroundedTask& task) {
  json out = json::object();
  out["makespan"] = plan.makespan();
  json steps = json::array();
  for (std::size_t i = 0; i < plan.steps.size(); ++i) {
    const auto& a = task.action(plan.steps[i]);
    json step = json::object();
    step["action"] = a.name;
    step["args"] = a.args;
    if (i < plan.traces.size() && !plan.traces[i].empty()) {
      json trace = json::array();
      for (const auto& [x, y] : plan.traces[i]) trace.push_back(json::array({x, y}));
      step["trace"] = trace;
    }
    steps.push_back(step);
  }
  out["steps"] = steps;
  return out.dump(2) + "\n";
}

std::string plan_to_text(const Plan& plan, const GroundedTask& task) {
  std::string out;
  for (ActionId a : plan.steps) {
    const auto& act = task.action(a);
    out += "(" + act.name;
    for (const auto& o : act.args) out += " " + o;
    out += ")\n";
  }
  return out;
}

namespace {

std::vector<PlanStep> read_json_plan(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid plan JSON: ") + e.what(), {});
  }
  const json* steps = &doc;
  if (doc.is_object()) {
    if (!doc.contains("steps")) throw ParseError("plan JSON has no 'steps' list", {});
    steps = &doc.at("steps");
  }
  if (!steps->is_array()) throw ParseError("plan 'steps' must be a list", {});
  std::vector<PlanStep> out;
  for (std::size_t i = 0; i < steps->size(); ++i) {
    const json& s = (*steps)[i];
    const std::string where = "steps[" + std::to_string(i) + "]";
    if (!s.is_object() || !s.contains("action") || !s.at("action").is_string()) {
      throw ParseError(where + ": expected {\"action\": ..., \"args\": [...]}", {});
    }
    PlanStep step{util::to_lower(s.at("action").get<std::string>()), {}};
    if (s.contains("args")) {
      if (!s.at("args").is_array()) throw ParseError(where + ": 'args' must be a list", {});
      for (const auto& a : s.at("args")) {
        if (!a.is_string()) throw ParseError(where + ": arguments must be strings", {});
        step.args.push_back(util::to_lower(a.get<std::string>()));
      }
    }
    out.push_back(std::move(step));
  }
  return out;
}

}  // namespace

std::vector<PlanStep> read_plan(std::string_view text) {
  const std::string trimmed = util::trim(std::string(text));
  if (!trimmed.empty() && (trimmed.front() == '{' || trimmed.front() == '[')) return read_json_plan(trimmed);

  std::vector<PlanStep> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto c = line.find_first_of(";#"); c != std::string::npos) line.erase(c);
    int depth = 0;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '(') ++depth;
      if (line[i] == ')') --depth;
      if (depth < 0 || depth > 1) {
        throw ParseError("unbalanced parentheses in plan", {lineno, static_cast<int>(i) + 1});
      }
    }
    if (depth != 0) throw ParseError("unbalanced parentheses in plan", {lineno, static_cast<int>(line.size())});
    for (char& ch : line) {
      if (ch == '(' || ch == ')' || ch == ',') ch = ' ';
    }
    std::istringstream words(line);
    std::vector<std::string> parts;
    for (std::string w; words >> w;) parts.push_back(util::to_lower(w));
    if (parts.empty()) continue;
    for (const auto& p : parts) {
      for (char ch : p) {
        if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '-' && ch != '_' && ch != '.') {
          throw ParseError("unexpected character '" + std::string(1, ch) + "' in plan", {lineno, 1});
        }
      }
    }
    out.push_back({parts.front(), {parts.begin() + 1, parts.end()}});
  }
  return out;
}

std::vector<ActionId> resolve_plan(const std::vector<PlanStep>& steps, const GroundedTask& task) {
  std::vector<ActionId> out;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    auto id = task.find_action(steps[i].action, steps[i].args);
    if (!id) {
      throw ValidationError("step " + std::to_string(i) + ": unknown grounded action " + steps[i].action + "(" +
                            util::join(steps[i].args, ", ") + ")");
    }
    out.push_back(*id);
  }
  return out;
}

}  // namespace castl::planner

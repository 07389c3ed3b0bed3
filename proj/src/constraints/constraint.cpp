#include "castl/constraints/constraint.hpp"

#include <algorithm>

#include "castl/error.hpp"
#include "castl/util/strings.hpp"

namespace castl::constraints {

using logic::ExprKind;

bool ActionPattern::matches(const GroundedAction& a) const {
  if (a.name != action || a.args.size() != args.size()) return false;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] && *args[i] != a.args[i]) return false;
  }
  return true;
}

bool ActionPattern::is_concrete() const {
  return std::all_of(args.begin(), args.end(), [](const auto& a) { return a.has_value(); });
}

std::string ActionPattern::to_string() const {
  std::vector<std::string> parts;
  for (const auto& a : args) parts.push_back(a ? *a : "*");
  return action + "(" + util::join(parts, ", ") + ")";
}

void ConstraintSet::add(Constraint c) {
  std::visit(
      [this](auto&& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Eventual>) {
          eventuals.push_back(std::move(v));
        } else if constexpr (std::is_same_v<T, Global>) {
          globals.push_back(std::move(v));
        } else {
          implications.push_back(std::move(v));
        }
      },
      std::move(c));
}

void ConstraintSet::append(const ConstraintSet& other) {
  eventuals.insert(eventuals.end(), other.eventuals.begin(), other.eventuals.end());
  globals.insert(globals.end(), other.globals.begin(), other.globals.end());
  implications.insert(implications.end(), other.implications.begin(), other.implications.end());
  warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
}

std::set<std::string> canonical_keys(const ConstraintSet& set) {
  std::set<std::string> keys;
  for (const auto& e : set.eventuals) keys.insert("eventual " + logic::to_string(logic::canonicalize(e.expr)));
  for (const auto& g : set.globals) keys.insert("global " + logic::to_string(logic::canonicalize(g.expr)));
  for (const auto& i : set.implications) {
    keys.insert("implication " + i.gate.to_string() + " while " +
                logic::to_string(logic::canonicalize(i.blocked_while)));
  }
  return keys;
}

bool equivalent(const ConstraintSet& a, const ConstraintSet& b) { return canonical_keys(a) == canonical_keys(b); }

namespace {

bool is_literal(const Expr& e) {
  return e.kind == ExprKind::Atom || (e.kind == ExprKind::Not && e.children.front().kind == ExprKind::Atom);
}

}  // namespace

bool is_literal_conjunction(const Expr& e) {
  if (e.is_constant(true) || is_literal(e)) return true;
  if (e.kind != ExprKind::And) return false;
  return std::all_of(e.children.begin(), e.children.end(), is_literal);
}

std::vector<pddl::ActionId> expand_pattern(const ActionPattern& pattern, const GroundedTask& task) {
  std::vector<pddl::ActionId> out;
  const auto& actions = task.actions();
  for (std::size_t i = 0; i < actions.size(); ++i) {
    if (pattern.matches(actions[i])) out.push_back(static_cast<pddl::ActionId>(i));
  }
  if (!out.empty()) return out;

  const auto* schema = task.domain().find_action(pattern.action);
  if (schema == nullptr) {
    std::vector<std::string> names;
    for (const auto& a : task.domain().actions) names.push_back(a.name);
    throw ValidationError("action pattern " + pattern.to_string() + " matches no grounded action: unknown action '" +
                          pattern.action + "' (closest: " + util::join(util::nearest_names(pattern.action, names), ", ") +
                          ")");
  }
  if (schema->params.size() != pattern.args.size()) {
    throw ValidationError("action pattern " + pattern.to_string() + " has " + std::to_string(pattern.args.size()) +
                          " arguments, '" + pattern.action + "' takes " + std::to_string(schema->params.size()));
  }
  for (const auto& a : pattern.args) {
    if (a && task.type_of(*a) == nullptr) {
      throw ValidationError("action pattern " + pattern.to_string() + " references unknown object '" + *a + "'");
    }
  }
  std::vector<std::string> labels;
  for (const auto& a : actions) {
    if (a.name == pattern.action) labels.push_back(a.label());
  }
  throw ValidationError("action pattern " + pattern.to_string() + " matches no grounded action (closest: " +
                        util::join(util::nearest_names(pattern.to_string(), labels), ", ") + ")");
}

ConstraintSet resolve_attributes(const ConstraintSet& set, const GroundedTask& task) {
  ConstraintSet out;
  out.warnings = set.warnings;
  pddl::InstantiateOptions options;
  options.error_on_empty_exists = true;
  options.warnings = &out.warnings;

  auto resolve = [&](const Expr& e) {
    Expr g = task.instantiate(e, options);
    task.compile(g);  // validates every remaining atom
    return logic::canonicalize(logic::to_nnf(g));
  };
  auto conjuncts = [](const Expr& e) {
    if (e.kind == ExprKind::And) return e.children;
    return std::vector<Expr>{e};
  };

  for (const auto& ev : set.eventuals) {
    Expr g = resolve(ev.expr);
    if (!is_literal_conjunction(g) && !g.is_constant(false)) {
      throw ValidationError("eventual constraint must be a conjunction of literals: " + logic::to_string(g) +
                            (ev.provenance.empty() ? "" : " (" + ev.provenance + ")"));
    }
    if (g.is_constant(true)) {
      out.warnings.push_back("eventual constraint is trivially true and was dropped" +
                             (ev.provenance.empty() ? std::string() : " (" + ev.provenance + ")"));
      continue;
    }
    for (auto& c : conjuncts(g)) out.eventuals.push_back({std::move(c), ev.provenance});
  }
  for (const auto& gl : set.globals) {
    Expr g = resolve(gl.expr);
    if (g.is_constant(true)) {
      out.warnings.push_back("global constraint is trivially true and was dropped" +
                             (gl.provenance.empty() ? std::string() : " (" + gl.provenance + ")"));
      continue;
    }
    for (auto& c : conjuncts(g)) out.globals.push_back({std::move(c), gl.provenance});
  }
  for (const auto& im : set.implications) {
    Expr cond = resolve(im.blocked_while);
    std::vector<Expr> parts = cond.kind == ExprKind::Or ? cond.children : std::vector<Expr>{cond};
    for (pddl::ActionId id : expand_pattern(im.gate, task)) {
      const auto& a = task.action(id);
      ActionPattern concrete{a.name, {}};
      for (const auto& arg : a.args) concrete.args.emplace_back(arg);
      for (const auto& p : parts) out.implications.push_back({concrete, p, im.provenance});
    }
  }
  return out;
}

}  // namespace castl::constraints

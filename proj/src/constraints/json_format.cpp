#include "castl/constraints/json_format.hpp"

#include "castl/error.hpp"
#include "castl/util/strings.hpp"
#include "json.hpp"

namespace castl::constraints {

namespace {

using nlohmann::json;
using logic::ExprKind;

/// Drops `...` placeholders and trailing commas outside string literals.
std::string sanitize(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_string = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (in_string) {
      out.push_back(c);
      if (c == '\\' && i + 1 < text.size()) {
        out.push_back(text[++i]);
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') {
      in_string = true;
      out.push_back(c);
      continue;
    }
    if (c == '.' && text.substr(i, 3) == "...") {
      i += 2;
      std::size_t j = i + 1;
      while (j < text.size() && std::isspace(static_cast<unsigned char>(text[j]))) ++j;
      if (j < text.size() && text[j] == ',') i = j;
      continue;
    }
    out.push_back(c);
  }
  // Second pass: remove commas directly followed by a closing bracket.
  std::string cleaned;
  cleaned.reserve(out.size());
  in_string = false;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const char c = out[i];
    if (in_string) {
      cleaned.push_back(c);
      if (c == '\\' && i + 1 < out.size()) {
        cleaned.push_back(out[++i]);
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    if (c == '"') in_string = true;
    if (c == ',') {
      std::size_t j = i + 1;
      while (j < out.size() && std::isspace(static_cast<unsigned char>(out[j]))) ++j;
      if (j < out.size() && (out[j] == ']' || out[j] == '}')) continue;
    }
    cleaned.push_back(c);
  }
  return cleaned;
}

SourceLocation location_of(std::string_view text, std::size_t byte) {
  SourceLocation loc{1, 1};
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++loc.line;
      loc.column = 1;
    } else {
      ++loc.column;
    }
  }
  return loc;
}

std::string entry_name(std::size_t i) { return "json[" + std::to_string(i) + "]"; }

std::string string_at(const json& arr, std::size_t k, const std::string& where) {
  if (!arr.at(k).is_string()) throw ParseError(where + ": expected a string", {});
  return util::to_lower(arr.at(k).get<std::string>());
}

Expr literal(const json& lit, const std::string& where) {
  if (!lit.is_array() || lit.empty()) throw ParseError(where + ": malformed literal array, expected [\"pred\", args...]", {});
  std::size_t k = 0;
  bool negated = false;
  if (string_at(lit, 0, where) == "not") {
    negated = true;
    k = 1;
    if (lit.size() < 2) throw ParseError(where + ": malformed literal array, 'not' without predicate", {});
  }
  std::string pred = string_at(lit, k, where);
  std::vector<logic::Term> args;
  for (std::size_t i = k + 1; i < lit.size(); ++i) args.push_back(logic::Term::object(string_at(lit, i, where)));
  Expr atom = Expr::atom(std::move(pred), std::move(args));
  return negated ? Expr::negate(std::move(atom)) : atom;
}

Expr condition_of(const json& entry, const std::string& where) {
  if (!entry.contains("condition")) return Expr::constant(true);
  const json& cond = entry.at("condition");
  if (!cond.is_array()) throw ParseError(where + ": 'condition' must be an array of literal arrays", {});
  std::vector<Expr> parts;
  for (std::size_t i = 0; i < cond.size(); ++i) {
    parts.push_back(literal(cond[i], where + ".condition[" + std::to_string(i) + "]"));
  }
  if (parts.size() == 1) return std::move(parts.front());
  return parts.empty() ? Expr::constant(true) : Expr::conjunction(std::move(parts));
}

json literal_json(const Expr& e) {
  const bool neg = e.kind == ExprKind::Not;
  const Expr& atom = neg ? e.children.front() : e;
  json arr = json::array();
  if (neg) arr.push_back("not");
  arr.push_back(atom.name);
  for (const auto& t : atom.args) arr.push_back(t.name);
  return arr;
}

json condition_json(const Expr& e) {
  if (!is_literal_conjunction(e)) {
    throw Error("constraint expression cannot be written as a JSON literal conjunction: " + logic::to_string(e));
  }
  json arr = json::array();
  if (e.is_constant(true)) return arr;
  if (e.kind == ExprKind::And) {
    for (const auto& c : e.children) arr.push_back(literal_json(c));
  } else {
    arr.push_back(literal_json(e));
  }
  return arr;
}

}  // namespace

ConstraintSet read_constraint_json(std::string_view text) {
  const std::string clean = sanitize(text);
  json doc;
  try {
    doc = json::parse(clean);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), location_of(clean, e.byte > 0 ? e.byte - 1 : 0));
  }
  if (!doc.is_array()) throw ParseError("constraint JSON must be a list of constraint objects", {1, 1});
  ConstraintSet set;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const json& entry = doc[i];
    const std::string where = entry_name(i);
    if (!entry.is_object()) throw ParseError(where + ": expected an object", {});
    if (!entry.contains("type") || !entry.at("type").is_string()) throw ParseError(where + ": missing 'type'", {});
    const std::string type = util::to_lower(entry.at("type").get<std::string>());
    if (type == "implication") {
      if (!entry.contains("action") || !entry.at("action").is_array() || entry.at("action").empty()) {
        throw ParseError(where + ": implication requires an 'action' array", {});
      }
      const json& act = entry.at("action");
      ActionPattern gate{string_at(act, 0, where + ".action"), {}};
      for (std::size_t k = 1; k < act.size(); ++k) {
        std::string a = string_at(act, k, where + ".action");
        if (a == "*") {
          gate.args.emplace_back(std::nullopt);
        } else {
          gate.args.emplace_back(std::move(a));
        }
      }
      set.implications.push_back({std::move(gate), condition_of(entry, where), where});
    } else if (type == "global") {
      set.globals.push_back({condition_of(entry, where), where});
    } else {
      throw ParseError(where + ": unknown constraint type '" + type + "'", {});
    }
  }
  return set;
}

ConstraintSet parse_constraint_json(std::string_view text, const GroundedTask& task) {
  return resolve_attributes(read_constraint_json(text), task);
}

std::string write_constraint_json(const ConstraintSet& set) {
  if (!set.eventuals.empty()) throw Error("eventual constraints belong in the PDDL goal, not the JSON constraint file");
  json out = json::array();
  for (const auto& im : set.implications) {
    json action = json::array({im.gate.action});
    for (const auto& a : im.gate.args) action.push_back(a ? *a : std::string("*"));
    json entry = json::object();
    entry["type"] = "implication";
    entry["action"] = action;
    entry["condition"] = condition_json(im.blocked_while);
    out.push_back(entry);
  }
  for (const auto& g : set.globals) {
    json entry = json::object();
    entry["type"] = "global";
    entry["condition"] = condition_json(g.expr);
    out.push_back(entry);
  }
  return out.dump(2) + "\n";
}

}  // namespace castl::constraints

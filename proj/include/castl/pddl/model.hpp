#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "castl/logic/expr.hpp"
#include "json.hpp"

namespace castl::pddl {

using logic::Expr;
using logic::GroundedAtom;

/// A name with a declared type, used for parameters, constants and objects.
struct TypedName {
  std::string name;
  std::string type = "object";

  bool operator==(const TypedName&) const = default;
};

struct TypeDecl {
  std::string name;
  std::string parent = "object";

  bool operator==(const TypeDecl&) const = default;
};

struct PredicateSchema {
  std::string name;
  std::vector<TypedName> params;

  bool operator==(const PredicateSchema&) const = default;
};

/// An action schema. Effects are atoms over the parameters and domain constants.
struct ActionSchema {
  std::string name;
  std::vector<TypedName> params;
  Expr precondition = Expr::constant(true);
  std::vector<Expr> add_effects;
  std::vector<Expr> delete_effects;

  bool operator==(const ActionSchema&) const = default;
};

/// A parsed PDDL domain. Types form a single-inheritance tree rooted at the implicit
/// `object` type.
struct DomainModel {
  std::string name;
  std::vector<std::string> requirements;
  std::vector<TypeDecl> types;
  std::vector<TypedName> constants;
  std::vector<PredicateSchema> predicates;
  std::vector<ActionSchema> actions;

  const PredicateSchema* find_predicate(const std::string& name) const;
  const ActionSchema* find_action(const std::string& name) const;
  bool has_type(const std::string& type) const;
  /// True if `type` equals `ancestor` or inherits from it.
  bool is_subtype(const std::string& type, const std::string& ancestor) const;
  /// Names of predicates that appear in some action effect.
  std::set<std::string> fluent_predicates() const;

  bool operator==(const DomainModel&) const = default;
};

/// Objects, attributes, initial state and goal of one planning problem.
///
/// Attributes are static boolean object properties (e.g. colours) that PDDL cannot
/// quantify over; they are supplied by the JSON sidecar. `geometry` is kept as raw JSON
/// and interpreted by the motion backends.
struct SceneDescription {
  std::string name;
  std::string domain_name;
  std::vector<TypedName> objects;
  std::map<std::string, std::set<std::string>> attributes;
  std::vector<GroundedAtom> init;  // sorted, unique
  Expr goal = Expr::constant(true);
  std::optional<nlohmann::json> geometry;

  const std::string* type_of(const std::string& object) const;
  bool has_object(const std::string& object) const { return type_of(object) != nullptr; }

  bool operator==(const SceneDescription&) const = default;
};

}  // namespace castl::pddl

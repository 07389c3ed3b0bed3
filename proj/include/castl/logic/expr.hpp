#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

namespace castl::logic {

using AtomId = std::uint32_t;
using ActionId = std::uint32_t;

/// A predicate applied to concrete objects, e.g. on(b1, b2).
struct GroundedAtom {
  std::string predicate;
  std::vector<std::string> args;

  auto operator<=>(const GroundedAtom&) const = default;
  bool operator==(const GroundedAtom&) const = default;
};

std::string to_string(const GroundedAtom& atom);

/// A term is either an object name or a variable bound by a parameter list or quantifier.
struct Term {
  std::string name;
  bool variable = false;

  static Term object(std::string name) { return {std::move(name), false}; }
  static Term var(std::string name) { return {std::move(name), true}; }

  auto operator<=>(const Term&) const = default;
  bool operator==(const Term&) const = default;
};

/// Domain of a quantifier. `Named` is left for resolution against the scene: it may
/// name an attribute or a type.
struct ObjectSet {
  enum class Kind { Type, Attribute, Named, Explicit };

  Kind kind = Kind::Explicit;
  std::string name;
  std::vector<std::string> objects;
  std::vector<std::string> excluded;

  static ObjectSet of_type(std::string type) { return {Kind::Type, std::move(type), {}, {}}; }
  static ObjectSet explicit_list(std::vector<std::string> objs) {
    return {Kind::Explicit, {}, std::move(objs), {}};
  }

  bool operator==(const ObjectSet&) const = default;
};

enum class ExprKind { Constant, Atom, Equals, Attribute, Not, And, Or, Implies, ForAll, Exists };

/// Recursive logical formula. Used for schema-level PDDL preconditions (with variables),
/// unresolved constraint expressions (attribute literals, quantifiers), and fully grounded
/// expressions (constants, atoms and connectives only).
struct Expr {
  ExprKind kind = ExprKind::Constant;
  bool value = true;
  std::string name;
  std::vector<Term> args;
  std::vector<Expr> children;
  std::string variable;
  ObjectSet domain;

  static Expr constant(bool v);
  static Expr atom(std::string predicate, std::vector<Term> args);
  static Expr atom(const GroundedAtom& atom);
  static Expr equals(Term lhs, Term rhs);
  static Expr attribute(std::string attribute, Term object);
  static Expr negate(Expr e);
  static Expr conjunction(std::vector<Expr> parts);
  static Expr disjunction(std::vector<Expr> parts);
  static Expr implies(Expr lhs, Expr rhs);
  static Expr forall(std::string var, ObjectSet domain, Expr body);
  static Expr exists(std::string var, ObjectSet domain, Expr body);

  bool is_constant(bool v) const { return kind == ExprKind::Constant && value == v; }

  bool operator==(const Expr&) const = default;
};

/// True when the expression contains only constants, ground atoms and connectives.
bool is_ground(const Expr& e);

/// Replaces free occurrences of variable `var` by object `object`.
Expr substitute(const Expr& e, const std::string& var, const std::string& object);

/// Constant folding and flattening of nested and/or. Idempotent.
Expr simplify(const Expr& e);

/// simplify() plus sorting and de-duplication of and/or children, so that equal
/// formulas up to commutativity compare equal.
Expr canonicalize(const Expr& e);

/// Negation normal form: negations only on atoms, no implications.
Expr to_nnf(const Expr& e);

/// Human-readable, re-parseable rendering in the constraint script syntax.
std::string to_string(const Expr& e);
std::string to_string(const ObjectSet& set);

/// Evaluates a ground expression. Throws std::invalid_argument on quantifiers, attribute
/// literals or non-ground atoms.
bool evaluate(const Expr& e, const std::function<bool(const GroundedAtom&)>& holds);

/// Collects every ground atom occurring in `e`.
void collect_atoms(const Expr& e, std::vector<GroundedAtom>& out);

}  // namespace castl::logic

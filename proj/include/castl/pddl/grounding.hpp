#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "castl/logic/formula.hpp"
#include "castl/pddl/model.hpp"

namespace castl::pddl {

using logic::ActionId;
using logic::AtomId;
using logic::Formula;
using logic::State;

/// A fully instantiated action. Static atoms in the precondition are already folded.
struct GroundedAction {
  std::string name;
  std::vector<std::string> args;
  Expr precondition;
  Formula pre;
  std::vector<AtomId> add;
  std::vector<AtomId> del;  // disjoint from add

  /// "pick-up(b1, t1)"
  std::string label() const;
};

/// Controls quantifier expansion in GroundedTask::instantiate.
struct InstantiateOptions {
  /// Reject an existential over an empty set instead of folding it to false.
  bool error_on_empty_exists = false;
  /// Receives a message for every universal over an empty set when non-null.
  std::vector<std::string>* warnings = nullptr;
};

/// Propositional view of a problem: every type-correct fluent atom, every grounded action
/// whose precondition is not statically false, the initial state and the goal.
/// Immutable after construction.
class GroundedTask {
 public:
  GroundedTask(const DomainModel& domain, const SceneDescription& scene);

  const DomainModel& domain() const { return *domain_; }
  const SceneDescription& scene() const { return *scene_; }

  const std::vector<GroundedAtom>& atoms() const { return atoms_; }
  const std::vector<GroundedAction>& actions() const { return actions_; }
  const GroundedAtom& atom(AtomId id) const { return atoms_[id]; }
  const GroundedAction& action(ActionId id) const { return actions_[id]; }

  std::optional<AtomId> find_atom(const GroundedAtom& atom) const;
  std::optional<ActionId> find_action(const std::string& name, const std::vector<std::string>& args) const;

  bool is_static(const std::string& predicate) const;
  bool static_holds(const GroundedAtom& atom) const;

  /// Objects (domain constants and scene objects) whose type is `type` or a subtype.
  const std::vector<std::string>& objects_of_type(const std::string& type) const;
  const std::string* type_of(const std::string& object) const;

  /// Resolves a quantifier domain to concrete objects. Throws ValidationError on unknown
  /// attributes, types or objects.
  std::vector<std::string> objects_in(const logic::ObjectSet& set) const;

  /// Expands quantifiers, folds attribute literals, equalities and static atoms, and
  /// simplifies. The result is ground. Throws ValidationError on unknown names.
  Expr instantiate(const Expr& e, const InstantiateOptions& options = {}) const;

  /// Compiles a ground expression to an id-based formula, checking every atom against
  /// the domain (unknown predicate, arity, unknown object, type mismatch).
  Formula compile(const Expr& ground_expr) const;

  const State& initial_state() const { return initial_; }
  const Expr& goal() const { return goal_; }
  const Formula& goal_formula() const { return goal_formula_; }

  State apply(const State& s, ActionId a) const;
  bool holds(const State& s, const GroundedAtom& atom) const;
  std::vector<GroundedAtom> state_atoms(const State& s) const;

 private:
  static std::string key(const std::string& name, const std::vector<std::string>& args);
  void validate_atom(const GroundedAtom& atom) const;
  Expr instantiate_rec(const Expr& e, const InstantiateOptions& options) const;

  std::shared_ptr<const DomainModel> domain_;
  std::shared_ptr<const SceneDescription> scene_;
  std::map<std::string, std::string> object_types_;
  std::vector<std::string> object_order_;
  std::map<std::string, std::vector<std::string>> by_type_;
  std::set<std::string> fluent_predicates_;
  std::set<GroundedAtom> static_facts_;
  std::vector<GroundedAtom> atoms_;
  std::unordered_map<std::string, AtomId> atom_index_;
  std::vector<GroundedAction> actions_;
  std::unordered_map<std::string, ActionId> action_index_;
  State initial_;
  Expr goal_;
  Formula goal_formula_;
};

/// Grounds `domain` against `scene`.
inline GroundedTask ground(const DomainModel& domain, const SceneDescription& scene) {
  return GroundedTask(domain, scene);
}

}  // namespace castl::pddl

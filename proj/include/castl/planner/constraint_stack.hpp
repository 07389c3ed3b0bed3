#pragma once

#include <string>
#include <vector>

#include "castl/sat/solver.hpp"

namespace castl::planner {

/// Scoped clause store on top of an incremental solver. Every pushed scope owns an
/// activation literal; its clauses are stored as (clause ∨ ¬act) and act is assumed while
/// the scope is live. Popping adds the unit ¬act, which disables exactly that scope's
/// clauses. Scope 0 is the permanent base and cannot be popped.
class ConstraintStack {
 public:
  explicit ConstraintStack(sat::Solver& solver);

  /// Returns the index of the new scope.
  std::size_t push(std::string name);
  void pop();

  std::size_t depth() const { return scopes_.size(); }
  const std::string& name(std::size_t scope) const { return scopes_.at(scope).name; }
  std::size_t clause_count(std::size_t scope) const { return scopes_.at(scope).clauses; }

  /// Adds a clause to a live scope (not necessarily the top one).
  void add(std::size_t scope, std::vector<sat::Lit> clause);
  void add(std::vector<sat::Lit> clause) { add(depth() - 1, std::move(clause)); }

  /// Activation literals of all live scopes, bottom first.
  std::vector<sat::Lit> assumptions() const;

  sat::Solver& solver() { return solver_; }

 private:
  struct Scope {
    std::string name;
    sat::Lit act;
    std::size_t clauses = 0;
  };

  sat::Solver& solver_;
  std::vector<Scope> scopes_;
};

}  // namespace castl::planner

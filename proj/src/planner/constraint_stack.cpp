#include "castl/planner/constraint_stack.hpp"

#include "castl/error.hpp"

namespace castl::planner {

ConstraintStack::ConstraintStack(sat::Solver& solver) : solver_(solver) { scopes_.push_back({"base", sat::Lit{}, 0}); }

std::size_t ConstraintStack::push(std::string name) {
  scopes_.push_back({std::move(name), sat::Lit::pos(solver_.new_var()), 0});
  return scopes_.size() - 1;
}

void ConstraintStack::pop() {
  if (scopes_.size() == 1) throw Error("cannot pop the base scope");
  solver_.add_clause({~scopes_.back().act});
  scopes_.pop_back();
}

void ConstraintStack::add(std::size_t scope, std::vector<sat::Lit> clause) {
  auto& s = scopes_.at(scope);
  if (scope > 0) clause.push_back(~s.act);
  ++s.clauses;
  solver_.add_clause(std::move(clause));
}

std::vector<sat::Lit> ConstraintStack::assumptions() const {
  std::vector<sat::Lit> out;
  for (std::size_t i = 1; i < scopes_.size(); ++i) out.push_back(scopes_[i].act);
  return out;
}

}  // namespace castl::planner

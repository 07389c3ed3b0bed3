#include "castl/constraints/builder.hpp"

#include "castl/error.hpp"
#include "castl/util/strings.hpp"

namespace castl::constraints {

Expr ConstraintBuilder::make_grounded_predicate(const std::string& name, const std::vector<std::string>& args) const {
  std::vector<logic::Term> terms;
  for (const auto& a : args) terms.push_back(logic::Term::object(util::to_lower(a)));
  Expr atom = Expr::atom(util::to_lower(name), std::move(terms));
  task_.compile(atom);
  return atom;
}

Expr ConstraintBuilder::make_and(std::vector<Expr> parts) {
  if (parts.empty()) return Expr::constant(true);
  return Expr::conjunction(std::move(parts));
}

Expr ConstraintBuilder::make_or(std::vector<Expr> parts) {
  if (parts.empty()) return Expr::constant(false);
  return Expr::disjunction(std::move(parts));
}

Expr ConstraintBuilder::make_not(Expr e) { return Expr::negate(std::move(e)); }

Expr ConstraintBuilder::make_implies(Expr lhs, Expr rhs) { return Expr::implies(std::move(lhs), std::move(rhs)); }

ActionPattern ConstraintBuilder::make_action_assignment(const std::string& name,
                                                        const std::vector<std::string>& args) const {
  ActionPattern p{util::to_lower(name), {}};
  for (const auto& a : args) {
    if (a == "*") {
      p.args.emplace_back(std::nullopt);
    } else {
      p.args.emplace_back(util::to_lower(a));
    }
  }
  expand_pattern(p, task_);
  return p;
}

Implication ConstraintBuilder::block_expression_action(const ActionPattern& gate, Expr condition) const {
  expand_pattern(gate, task_);
  task_.compile(task_.instantiate(condition));
  return {gate, std::move(condition), "builder"};
}

Global ConstraintBuilder::always(Expr condition) const {
  task_.compile(task_.instantiate(condition));
  return {std::move(condition), "builder"};
}

}  // namespace castl::constraints

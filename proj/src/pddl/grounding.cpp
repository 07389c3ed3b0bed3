#include "castl/pddl/grounding.hpp"

#include <algorithm>

#include "castl/error.hpp"
#include "castl/util/strings.hpp"

namespace castl::pddl {

namespace {

using logic::ExprKind;
using logic::ObjectSet;

/// Calls `fn` with every tuple in the cartesian product of `domains`.
template <typename Fn>
void for_each_tuple(const std::vector<const std::vector<std::string>*>& domains, Fn&& fn) {
  for (const auto* d : domains) {
    if (d->empty()) return;
  }
  std::vector<std::size_t> idx(domains.size(), 0);
  std::vector<std::string> tuple(domains.size());
  while (true) {
    for (std::size_t i = 0; i < domains.size(); ++i) tuple[i] = (*domains[i])[idx[i]];
    fn(tuple);
    std::size_t pos = domains.size();
    while (pos > 0) {
      --pos;
      if (++idx[pos] < domains[pos]->size()) break;
      idx[pos] = 0;
      if (pos == 0) return;
    }
    if (domains.empty()) return;
  }
}

GroundedAtom ground_atom(const Expr& atom) {
  GroundedAtom a{atom.name, {}};
  for (const auto& t : atom.args) {
    if (t.variable) throw ValidationError("unbound variable '" + t.name + "' in " + logic::to_string(atom));
    a.args.push_back(t.name);
  }
  return a;
}

}  // namespace

std::string GroundedAction::label() const {
  return name + "(" + util::join(args, ", ") + ")";
}

std::string GroundedTask::key(const std::string& name, const std::vector<std::string>& args) {
  std::string k = name;
  for (const auto& a : args) {
    k.push_back(' ');
    k += a;
  }
  return k;
}

GroundedTask::GroundedTask(const DomainModel& domain, const SceneDescription& scene)
    : domain_(std::make_shared<const DomainModel>(domain)),
      scene_(std::make_shared<const SceneDescription>(scene)) {
  for (const auto& list : {std::cref(domain.constants), std::cref(scene.objects)}) {
    for (const auto& o : list.get()) {
      if (!domain.has_type(o.type)) throw ValidationError("unknown object type '" + o.type + "' for '" + o.name + "'");
      if (!object_types_.emplace(o.name, o.type).second) throw ValidationError("duplicate object '" + o.name + "'");
      object_order_.push_back(o.name);
    }
  }
  std::vector<std::string> type_names{"object"};
  for (const auto& t : domain.types) type_names.push_back(t.name);
  for (const auto& t : type_names) {
    auto& list = by_type_[t];
    for (const auto& o : object_order_) {
      if (domain.is_subtype(object_types_.at(o), t)) list.push_back(o);
    }
  }
  for (const auto& [name, members] : scene.attributes) {
    for (const auto& m : members) {
      if (object_types_.count(m) == 0) {
        throw ValidationError("attribute '" + name + "' references unknown object '" + m + "'");
      }
    }
  }

  fluent_predicates_ = domain.fluent_predicates();
  for (const auto& a : scene.init) {
    validate_atom(a);
    if (!is_static(a.predicate)) continue;
    static_facts_.insert(a);
  }

  for (const auto& p : domain.predicates) {
    if (!is_static(p.name)) {
      std::vector<const std::vector<std::string>*> domains;
      for (const auto& param : p.params) domains.push_back(&objects_of_type(param.type));
      for_each_tuple(domains, [&](const std::vector<std::string>& tuple) {
        atom_index_.emplace(key(p.name, tuple), static_cast<AtomId>(atoms_.size()));
        atoms_.push_back({p.name, tuple});
      });
    }
  }

  initial_ = State(atoms_.size());
  for (const auto& a : scene.init) {
    if (auto id = find_atom(a)) initial_.set(*id);
  }

  for (const auto& schema : domain.actions) {
    std::vector<const std::vector<std::string>*> domains;
    for (const auto& param : schema.params) domains.push_back(&objects_of_type(param.type));
    for_each_tuple(domains, [&](const std::vector<std::string>& tuple) {
      Expr pre = schema.precondition;
      for (std::size_t i = 0; i < tuple.size(); ++i) pre = logic::substitute(pre, schema.params[i].name, tuple[i]);
      pre = instantiate(pre);
      if (pre.is_constant(false)) return;

      GroundedAction action;
      action.name = schema.name;
      action.args = tuple;
      auto effect_ids = [&](const std::vector<Expr>& effects, std::vector<AtomId>& out) {
        for (Expr e : effects) {
          for (std::size_t i = 0; i < tuple.size(); ++i) e = logic::substitute(e, schema.params[i].name, tuple[i]);
          out.push_back(find_atom(ground_atom(e)).value());
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
      };
      effect_ids(schema.add_effects, action.add);
      effect_ids(schema.delete_effects, action.del);
      // Add wins when an atom is both added and deleted.
      std::erase_if(action.del, [&](AtomId id) {
        return std::binary_search(action.add.begin(), action.add.end(), id);
      });
      action.pre = compile(pre);
      action.precondition = std::move(pre);
      action_index_.emplace(key(action.name, action.args), static_cast<ActionId>(actions_.size()));
      actions_.push_back(std::move(action));
    });
  }

  goal_ = instantiate(scene.goal);
  goal_formula_ = compile(goal_);
}

std::optional<AtomId> GroundedTask::find_atom(const GroundedAtom& atom) const {
  auto it = atom_index_.find(key(atom.predicate, atom.args));
  if (it == atom_index_.end()) return std::nullopt;
  return it->second;
}

std::optional<ActionId> GroundedTask::find_action(const std::string& name,
                                                  const std::vector<std::string>& args) const {
  auto it = action_index_.find(key(name, args));
  if (it == action_index_.end()) return std::nullopt;
  return it->second;
}

bool GroundedTask::is_static(const std::string& predicate) const {
  return fluent_predicates_.count(predicate) == 0;
}

bool GroundedTask::static_holds(const GroundedAtom& atom) const { return static_facts_.count(atom) != 0; }

const std::vector<std::string>& GroundedTask::objects_of_type(const std::string& type) const {
  auto it = by_type_.find(type);
  if (it == by_type_.end()) throw ValidationError("unknown type '" + type + "'");
  return it->second;
}

const std::string* GroundedTask::type_of(const std::string& object) const {
  auto it = object_types_.find(object);
  return it == object_types_.end() ? nullptr : &it->second;
}

std::vector<std::string> GroundedTask::objects_in(const ObjectSet& set) const {
  std::vector<std::string> out;
  const auto& attrs = scene_->attributes;
  switch (set.kind) {
    case ObjectSet::Kind::Type:
      out = objects_of_type(set.name);
      break;
    case ObjectSet::Kind::Attribute: {
      auto it = attrs.find(set.name);
      if (it == attrs.end()) throw ValidationError("unknown attribute '" + set.name + "'");
      out.assign(it->second.begin(), it->second.end());
      break;
    }
    case ObjectSet::Kind::Named: {
      auto it = attrs.find(set.name);
      if (it != attrs.end()) {
        out.assign(it->second.begin(), it->second.end());
      } else if (by_type_.count(set.name) != 0) {
        out = by_type_.at(set.name);
      } else {
        std::vector<std::string> names;
        for (const auto& [n, m] : attrs) names.push_back(n);
        for (const auto& [n, m] : by_type_) names.push_back(n);
        throw ValidationError("unknown attribute '" + set.name + "' (closest: " +
                              util::join(util::nearest_names(set.name, names), ", ") + ")");
      }
      break;
    }
    case ObjectSet::Kind::Explicit:
      for (const auto& o : set.objects) {
        if (object_types_.count(o) == 0) throw ValidationError("unknown object '" + o + "'");
        if (std::find(out.begin(), out.end(), o) == out.end()) out.push_back(o);
      }
      break;
  }
  for (const auto& x : set.excluded) {
    if (object_types_.count(x) == 0) throw ValidationError("unknown object '" + x + "'");
    std::erase(out, x);
  }
  return out;
}

void GroundedTask::validate_atom(const GroundedAtom& atom) const {
  const PredicateSchema* schema = domain_->find_predicate(atom.predicate);
  if (schema == nullptr) {
    std::vector<std::string> names;
    for (const auto& p : domain_->predicates) names.push_back(p.name);
    throw ValidationError("unknown predicate '" + atom.predicate + "' (closest: " +
                          util::join(util::nearest_names(atom.predicate, names), ", ") + ")");
  }
  if (schema->params.size() != atom.args.size()) {
    throw ValidationError("arity mismatch for '" + atom.predicate + "': expected " +
                          std::to_string(schema->params.size()) + ", got " + std::to_string(atom.args.size()));
  }
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    const std::string* type = type_of(atom.args[i]);
    if (type == nullptr) {
      throw ValidationError("unknown object '" + atom.args[i] + "' in " + logic::to_string(atom));
    }
    if (!domain_->is_subtype(*type, schema->params[i].type)) {
      throw ValidationError("type mismatch: '" + atom.args[i] + "' of type '" + *type + "' used as '" +
                            schema->params[i].type + "' in " + logic::to_string(atom));
    }
  }
}

Expr GroundedTask::instantiate(const Expr& e, const InstantiateOptions& options) const {
  return logic::simplify(instantiate_rec(e, options));
}

Expr GroundedTask::instantiate_rec(const Expr& e, const InstantiateOptions& options) const {
  switch (e.kind) {
    case ExprKind::Constant:
      return e;
    case ExprKind::Atom: {
      if (domain_->find_predicate(e.name) == nullptr && scene_->attributes.count(e.name) != 0 &&
          e.args.size() == 1) {
        Expr attr = Expr::attribute(e.name, e.args.front());
        return instantiate_rec(attr, options);
      }
      GroundedAtom a = ground_atom(e);
      validate_atom(a);
      if (is_static(a.predicate)) return Expr::constant(static_holds(a));
      return e;
    }
    case ExprKind::Attribute: {
      auto it = scene_->attributes.find(e.name);
      if (it == scene_->attributes.end()) throw ValidationError("unknown attribute '" + e.name + "'");
      const auto& t = e.args.front();
      if (t.variable) throw ValidationError("unbound variable '" + t.name + "' in " + logic::to_string(e));
      if (object_types_.count(t.name) == 0) throw ValidationError("unknown object '" + t.name + "'");
      return Expr::constant(it->second.count(t.name) != 0);
    }
    case ExprKind::Equals: {
      for (const auto& t : e.args) {
        if (t.variable) throw ValidationError("unbound variable '" + t.name + "'");
        if (object_types_.count(t.name) == 0) throw ValidationError("unknown object '" + t.name + "'");
      }
      return Expr::constant(e.args[0].name == e.args[1].name);
    }
    case ExprKind::Not:
    case ExprKind::And:
    case ExprKind::Or:
    case ExprKind::Implies: {
      Expr out = e;
      for (auto& c : out.children) c = instantiate_rec(c, options);
      return logic::simplify(out);
    }
    case ExprKind::ForAll:
    case ExprKind::Exists: {
      const bool universal = e.kind == ExprKind::ForAll;
      const auto objects = objects_in(e.domain);
      if (objects.empty()) {
        if (universal) {
          if (options.warnings != nullptr) {
            options.warnings->push_back("universal quantifier over empty set '" + logic::to_string(e.domain) +
                                        "' is vacuously true");
          }
          return Expr::constant(true);
        }
        if (options.error_on_empty_exists) {
          throw ValidationError("existential quantifier over empty set '" + logic::to_string(e.domain) + "'");
        }
        return Expr::constant(false);
      }
      std::vector<Expr> parts;
      parts.reserve(objects.size());
      for (const auto& o : objects) {
        parts.push_back(instantiate_rec(logic::substitute(e.children.front(), e.variable, o), options));
      }
      return logic::simplify(universal ? Expr::conjunction(std::move(parts)) : Expr::disjunction(std::move(parts)));
    }
  }
  return e;
}

Formula GroundedTask::compile(const Expr& e) const {
  switch (e.kind) {
    case ExprKind::Constant:
      return Formula::constant(e.value);
    case ExprKind::Atom: {
      GroundedAtom a = ground_atom(e);
      validate_atom(a);
      if (is_static(a.predicate)) return Formula::constant(static_holds(a));
      return Formula::lit(find_atom(a).value());
    }
    case ExprKind::Not:
      return Formula::negate(compile(e.children.front()));
    case ExprKind::And:
    case ExprKind::Or: {
      std::vector<Formula> kids;
      kids.reserve(e.children.size());
      for (const auto& c : e.children) kids.push_back(compile(c));
      return e.kind == ExprKind::And ? Formula::conjunction(std::move(kids)) : Formula::disjunction(std::move(kids));
    }
    case ExprKind::Implies: {
      std::vector<Formula> kids;
      kids.push_back(Formula::negate(compile(e.children[0])));
      kids.push_back(compile(e.children[1]));
      return Formula::disjunction(std::move(kids));
    }
    default:
      throw ValidationError("expression is not ground: " + logic::to_string(e));
  }
}

State GroundedTask::apply(const State& s, ActionId a) const {
  State next = s;
  const auto& act = actions_[a];
  for (AtomId d : act.del) next.set(d, false);
  for (AtomId p : act.add) next.set(p, true);
  return next;
}

bool GroundedTask::holds(const State& s, const GroundedAtom& atom) const {
  if (is_static(atom.predicate)) return static_holds(atom);
  auto id = find_atom(atom);
  return id && s.test(*id);
}

std::vector<GroundedAtom> GroundedTask::state_atoms(const State& s) const {
  std::vector<GroundedAtom> out;
  for (AtomId id : s.true_atoms()) out.push_back(atoms_[id]);
  return out;
}

}  // namespace castl::pddl

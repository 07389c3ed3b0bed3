#include "castl/pddl/model.hpp"

#include <algorithm>

namespace castl::pddl {

const PredicateSchema* DomainModel::find_predicate(const std::string& pred) const {
  auto it = std::find_if(predicates.begin(), predicates.end(),
                         [&](const PredicateSchema& p) { return p.name == pred; });
  return it == predicates.end() ? nullptr : &*it;
}

const ActionSchema* DomainModel::find_action(const std::string& action) const {
  auto it = std::find_if(actions.begin(), actions.end(),
                         [&](const ActionSchema& a) { return a.name == action; });
  return it == actions.end() ? nullptr : &*it;
}

bool DomainModel::has_type(const std::string& type) const {
  if (type == "object") return true;
  return std::any_of(types.begin(), types.end(), [&](const TypeDecl& t) { return t.name == type; });
}

bool DomainModel::is_subtype(const std::string& type, const std::string& ancestor) const {
  std::string current = type;
  // Bounded walk; the parser rejects cycles.
  for (std::size_t depth = 0; depth <= types.size() + 1; ++depth) {
    if (current == ancestor) return true;
    if (current == "object") return false;
    auto it = std::find_if(types.begin(), types.end(),
                           [&](const TypeDecl& t) { return t.name == current; });
    if (it == types.end()) return false;
    current = it->parent;
  }
  return false;
}

std::set<std::string> DomainModel::fluent_predicates() const {
  std::set<std::string> out;
  for (const auto& a : actions) {
    for (const auto& e : a.add_effects) out.insert(e.name);
    for (const auto& e : a.delete_effects) out.insert(e.name);
  }
  return out;
}

const std::string* SceneDescription::type_of(const std::string& object) const {
  for (const auto& o : objects) {
    if (o.name == object) return &o.type;
  }
  return nullptr;
}

}  // namespace castl::pddl

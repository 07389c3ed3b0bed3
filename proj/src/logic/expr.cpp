#include "castl/logic/expr.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace castl::logic {

std::string to_string(const GroundedAtom& atom) {
  std::string out = atom.predicate + "(";
  for (std::size_t i = 0; i < atom.args.size(); ++i) {
    if (i != 0) out += ", ";
    out += atom.args[i];
  }
  return out + ")";
}

Expr Expr::constant(bool v) {
  Expr e;
  e.kind = ExprKind::Constant;
  e.value = v;
  return e;
}

Expr Expr::atom(std::string predicate, std::vector<Term> args) {
  Expr e;
  e.kind = ExprKind::Atom;
  e.name = std::move(predicate);
  e.args = std::move(args);
  return e;
}

Expr Expr::atom(const GroundedAtom& a) {
  std::vector<Term> terms;
  terms.reserve(a.args.size());
  for (const auto& o : a.args) terms.push_back(Term::object(o));
  return atom(a.predicate, std::move(terms));
}

Expr Expr::equals(Term lhs, Term rhs) {
  Expr e;
  e.kind = ExprKind::Equals;
  e.args = {std::move(lhs), std::move(rhs)};
  return e;
}

Expr Expr::attribute(std::string attribute, Term object) {
  Expr e;
  e.kind = ExprKind::Attribute;
  e.name = std::move(attribute);
  e.args = {std::move(object)};
  return e;
}

Expr Expr::negate(Expr inner) {
  Expr e;
  e.kind = ExprKind::Not;
  e.children.push_back(std::move(inner));
  return e;
}

Expr Expr::conjunction(std::vector<Expr> parts) {
  Expr e;
  e.kind = ExprKind::And;
  e.children = std::move(parts);
  return e;
}

Expr Expr::disjunction(std::vector<Expr> parts) {
  Expr e;
  e.kind = ExprKind::Or;
  e.children = std::move(parts);
  return e;
}

Expr Expr::implies(Expr lhs, Expr rhs) {
  Expr e;
  e.kind = ExprKind::Implies;
  e.children.push_back(std::move(lhs));
  e.children.push_back(std::move(rhs));
  return e;
}

Expr Expr::forall(std::string var, ObjectSet domain, Expr body) {
  Expr e;
  e.kind = ExprKind::ForAll;
  e.variable = std::move(var);
  e.domain = std::move(domain);
  e.children.push_back(std::move(body));
  return e;
}

Expr Expr::exists(std::string var, ObjectSet domain, Expr body) {
  Expr e = forall(std::move(var), std::move(domain), std::move(body));
  e.kind = ExprKind::Exists;
  return e;
}

bool is_ground(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Constant:
      return true;
    case ExprKind::Atom:
      return std::none_of(e.args.begin(), e.args.end(), [](const Term& t) { return t.variable; });
    case ExprKind::Equals:
    case ExprKind::Attribute:
    case ExprKind::ForAll:
    case ExprKind::Exists:
      return false;
    default:
      return std::all_of(e.children.begin(), e.children.end(),
                         [](const Expr& c) { return is_ground(c); });
  }
}

Expr substitute(const Expr& e, const std::string& var, const std::string& object) {
  Expr out = e;
  for (auto& t : out.args) {
    if (t.variable && t.name == var) t = Term::object(object);
  }
  if ((e.kind == ExprKind::ForAll || e.kind == ExprKind::Exists) && e.variable == var) {
    return out;  // shadowed
  }
  for (auto& c : out.children) c = substitute(c, var, object);
  return out;
}

namespace {

Expr simplify_junction(const Expr& e, bool is_and) {
  const ExprKind self = is_and ? ExprKind::And : ExprKind::Or;
  std::vector<Expr> kept;
  for (const auto& c : e.children) {
    Expr s = simplify(c);
    if (s.kind == ExprKind::Constant) {
      if (s.value != is_and) return Expr::constant(!is_and);
      continue;
    }
    if (s.kind == self) {
      for (auto& g : s.children) kept.push_back(std::move(g));
    } else {
      kept.push_back(std::move(s));
    }
  }
  if (kept.empty()) return Expr::constant(is_and);
  if (kept.size() == 1) return std::move(kept.front());
  return is_and ? Expr::conjunction(std::move(kept)) : Expr::disjunction(std::move(kept));
}

Expr simplify_not(Expr inner) {
  if (inner.kind == ExprKind::Constant) return Expr::constant(!inner.value);
  if (inner.kind == ExprKind::Not) return std::move(inner.children.front());
  return Expr::negate(std::move(inner));
}

}  // namespace

Expr simplify(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Constant:
    case ExprKind::Atom:
    case ExprKind::Attribute:
      return e;
    case ExprKind::Equals:
      if (!e.args[0].variable && !e.args[1].variable) {
        return Expr::constant(e.args[0].name == e.args[1].name);
      }
      if (e.args[0] == e.args[1]) return Expr::constant(true);
      return e;
    case ExprKind::Not:
      return simplify_not(simplify(e.children.front()));
    case ExprKind::And:
      return simplify_junction(e, true);
    case ExprKind::Or:
      return simplify_junction(e, false);
    case ExprKind::Implies: {
      Expr lhs = simplify(e.children[0]);
      Expr rhs = simplify(e.children[1]);
      if (lhs.kind == ExprKind::Constant) return lhs.value ? rhs : Expr::constant(true);
      if (rhs.kind == ExprKind::Constant) return rhs.value ? rhs : simplify_not(std::move(lhs));
      return Expr::implies(std::move(lhs), std::move(rhs));
    }
    case ExprKind::ForAll:
    case ExprKind::Exists: {
      Expr out = e;
      out.children.front() = simplify(e.children.front());
      return out;
    }
  }
  return e;
}

namespace {

Expr canonical_inner(const Expr& e) {
  Expr out = e;
  for (auto& c : out.children) c = canonical_inner(c);
  if (out.kind == ExprKind::And || out.kind == ExprKind::Or) {
    std::vector<std::pair<std::string, Expr>> keyed;
    keyed.reserve(out.children.size());
    for (auto& c : out.children) keyed.emplace_back(to_string(c), std::move(c));
    std::sort(keyed.begin(), keyed.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    keyed.erase(std::unique(keyed.begin(), keyed.end(),
                            [](const auto& a, const auto& b) { return a.first == b.first; }),
                keyed.end());
    out.children.clear();
    for (auto& [k, c] : keyed) out.children.push_back(std::move(c));
    if (out.children.size() == 1) return std::move(out.children.front());
  }
  return out;
}

void render(const Expr& e, std::ostringstream& os);

void render_list(const std::vector<Expr>& kids, std::ostringstream& os) {
  os << '(';
  for (std::size_t i = 0; i < kids.size(); ++i) {
    if (i != 0) os << ", ";
    render(kids[i], os);
  }
  os << ')';
}

void render(const Expr& e, std::ostringstream& os) {
  switch (e.kind) {
    case ExprKind::Constant:
      os << (e.value ? "true" : "false");
      return;
    case ExprKind::Atom:
    case ExprKind::Attribute:
      os << e.name << '(';
      for (std::size_t i = 0; i < e.args.size(); ++i) {
        if (i != 0) os << ", ";
        os << e.args[i].name;
      }
      os << ')';
      return;
    case ExprKind::Equals:
      os << "=(" << e.args[0].name << ", " << e.args[1].name << ')';
      return;
    case ExprKind::Not:
      os << "not";
      render_list(e.children, os);
      return;
    case ExprKind::And:
      os << "and";
      render_list(e.children, os);
      return;
    case ExprKind::Or:
      os << "or";
      render_list(e.children, os);
      return;
    case ExprKind::Implies:
      os << "implies";
      render_list(e.children, os);
      return;
    case ExprKind::ForAll:
    case ExprKind::Exists:
      os << (e.kind == ExprKind::ForAll ? "forall " : "exists ") << e.variable << " in "
         << to_string(e.domain) << " { ";
      render(e.children.front(), os);
      os << " }";
      return;
  }
}

}  // namespace

Expr canonicalize(const Expr& e) { return canonical_inner(simplify(e)); }

Expr to_nnf(const Expr& e, bool negated) {
  switch (e.kind) {
    case ExprKind::Constant:
      return Expr::constant(e.value != negated);
    case ExprKind::Atom:
    case ExprKind::Attribute:
    case ExprKind::Equals:
      return negated ? Expr::negate(e) : e;
    case ExprKind::Not:
      return to_nnf(e.children.front(), !negated);
    case ExprKind::And:
    case ExprKind::Or: {
      std::vector<Expr> kids;
      for (const auto& c : e.children) kids.push_back(to_nnf(c, negated));
      const bool conj = (e.kind == ExprKind::And) != negated;
      return conj ? Expr::conjunction(std::move(kids)) : Expr::disjunction(std::move(kids));
    }
    case ExprKind::Implies: {
      // a -> b == not(a) or b
      std::vector<Expr> kids{to_nnf(e.children[0], !negated), to_nnf(e.children[1], negated)};
      return negated ? Expr::conjunction(std::move(kids)) : Expr::disjunction(std::move(kids));
    }
    case ExprKind::ForAll:
    case ExprKind::Exists: {
      Expr body = to_nnf(e.children.front(), negated);
      const bool universal = (e.kind == ExprKind::ForAll) != negated;
      return universal ? Expr::forall(e.variable, e.domain, std::move(body))
                       : Expr::exists(e.variable, e.domain, std::move(body));
    }
  }
  return e;
}

Expr to_nnf(const Expr& e) { return to_nnf(e, false); }

std::string to_string(const ObjectSet& set) {
  std::string out;
  if (set.kind == ObjectSet::Kind::Explicit) {
    out = "{";
    for (std::size_t i = 0; i < set.objects.size(); ++i) {
      if (i != 0) out += ", ";
      out += set.objects[i];
    }
    out += "}";
  } else {
    out = set.name;
  }
  if (!set.excluded.empty()) {
    out += " except {";
    for (std::size_t i = 0; i < set.excluded.size(); ++i) {
      if (i != 0) out += ", ";
      out += set.excluded[i];
    }
    out += "}";
  }
  return out;
}

std::string to_string(const Expr& e) {
  std::ostringstream os;
  render(e, os);
  return os.str();
}

bool evaluate(const Expr& e, const std::function<bool(const GroundedAtom&)>& holds) {
  switch (e.kind) {
    case ExprKind::Constant:
      return e.value;
    case ExprKind::Atom: {
      GroundedAtom a{e.name, {}};
      for (const auto& t : e.args) {
        if (t.variable) throw std::invalid_argument("cannot evaluate non-ground atom " + to_string(e));
        a.args.push_back(t.name);
      }
      return holds(a);
    }
    case ExprKind::Equals:
      if (e.args[0].variable || e.args[1].variable) {
        throw std::invalid_argument("cannot evaluate non-ground equality");
      }
      return e.args[0].name == e.args[1].name;
    case ExprKind::Not:
      return !evaluate(e.children.front(), holds);
    case ExprKind::And:
      for (const auto& c : e.children) {
        if (!evaluate(c, holds)) return false;
      }
      return true;
    case ExprKind::Or:
      for (const auto& c : e.children) {
        if (evaluate(c, holds)) return true;
      }
      return false;
    case ExprKind::Implies:
      return !evaluate(e.children[0], holds) || evaluate(e.children[1], holds);
    case ExprKind::Attribute:
    case ExprKind::ForAll:
    case ExprKind::Exists:
      break;
  }
  throw std::invalid_argument("cannot evaluate unresolved expression " + to_string(e));
}

void collect_atoms(const Expr& e, std::vector<GroundedAtom>& out) {
  if (e.kind == ExprKind::Atom) {
    GroundedAtom a{e.name, {}};
    for (const auto& t : e.args) a.args.push_back(t.name);
    out.push_back(std::move(a));
    return;
  }
  for (const auto& c : e.children) collect_atoms(c, out);
}

}  // namespace castl::logic

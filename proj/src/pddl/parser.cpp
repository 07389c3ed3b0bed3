#include "castl/pddl/parser.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "castl/pddl/sexpr.hpp"

namespace castl::pddl {

namespace {

using logic::ExprKind;
using logic::ObjectSet;
using logic::Term;

const std::set<std::string> kSupportedRequirements = {
    ":strips",
    ":typing",
    ":negative-preconditions",
    ":equality",
    ":disjunctive-preconditions",
    ":existential-preconditions",
    ":universal-preconditions",
    ":quantified-preconditions",
};

[[noreturn]] void fail(const std::string& message, const SExpr& at) {
  throw ParseError(message, at.loc);
}

const std::string& symbol_of(const SExpr& s, const char* what) {
  if (s.is_list) fail(std::string("expected ") + what + ", found a list", s);
  return s.symbol;
}

const SExpr& list_of(const SExpr& s, const char* what) {
  if (!s.is_list) fail(std::string("expected ") + what + ", found '" + s.symbol + "'", s);
  return s;
}

bool is_variable(const std::string& name) { return !name.empty() && name.front() == '?'; }

/// Parses `a b - t c` style lists starting at `begin`. Untyped names default to `object`.
std::vector<TypedName> parse_typed_list(const std::vector<SExpr>& items, std::size_t begin,
                                        bool variables, const SExpr& owner) {
  std::vector<TypedName> out;
  std::size_t pending = 0;
  for (std::size_t i = begin; i < items.size(); ++i) {
    const SExpr& item = items[i];
    if (item.is_list) {
      if (!item.items.empty() && item.items.front().is_symbol("either")) {
        fail("'either' types are not supported", item);
      }
      fail("unexpected list in typed list", item);
    }
    if (item.symbol == "-") {
      if (i + 1 >= items.size()) fail("missing type after '-'", item);
      if (pending == 0) fail("type annotation without names", item);
      const std::string& type = symbol_of(items[i + 1], "type name");
      for (std::size_t k = out.size() - pending; k < out.size(); ++k) out[k].type = type;
      pending = 0;
      ++i;
      continue;
    }
    if (variables != is_variable(item.symbol)) {
      fail(variables ? "expected variable, found '" + item.symbol + "'"
                     : "unexpected variable '" + item.symbol + "'",
           item);
    }
    out.push_back({item.symbol, "object"});
    ++pending;
  }
  (void)owner;
  return out;
}

/// Shared expression parser for preconditions and goals.
class ExprParser {
 public:
  ExprParser(const DomainModel& domain, const std::map<std::string, std::string>& objects)
      : domain_(domain), objects_(objects) {}

  Expr parse(const SExpr& s, std::vector<TypedName>& bound) const {
    const SExpr& list = list_of(s, "expression");
    if (list.items.empty()) return Expr::constant(true);
    const std::string& head = symbol_of(list.items.front(), "operator or predicate");
    if (head == "and" || head == "or") {
      if (list.items.size() == 1) return Expr::constant(head == "and");
      std::vector<Expr> kids;
      for (std::size_t i = 1; i < list.items.size(); ++i) kids.push_back(parse(list.items[i], bound));
      return head == "and" ? Expr::conjunction(std::move(kids)) : Expr::disjunction(std::move(kids));
    }
    if (head == "not") {
      if (list.items.size() != 2) fail("'not' takes exactly one argument", list);
      return Expr::negate(parse(list.items[1], bound));
    }
    if (head == "imply") {
      if (list.items.size() != 3) fail("'imply' takes exactly two arguments", list);
      return Expr::implies(parse(list.items[1], bound), parse(list.items[2], bound));
    }
    if (head == "forall" || head == "exists") {
      if (list.items.size() != 3) fail("'" + head + "' takes a variable list and a body", list);
      const SExpr& vars_list = list_of(list.items[1], "variable list");
      auto vars = parse_typed_list(vars_list.items, 0, true, vars_list);
      if (vars.empty()) fail("quantifier without variables", vars_list);
      for (const auto& v : vars) {
        if (!domain_.has_type(v.type)) fail("undeclared type '" + v.type + "'", vars_list);
      }
      const std::size_t mark = bound.size();
      bound.insert(bound.end(), vars.begin(), vars.end());
      Expr body = parse(list.items[2], bound);
      bound.resize(mark);
      for (auto it = vars.rbegin(); it != vars.rend(); ++it) {
        body = head == "forall" ? Expr::forall(it->name, ObjectSet::of_type(it->type), std::move(body))
                                : Expr::exists(it->name, ObjectSet::of_type(it->type), std::move(body));
      }
      return body;
    }
    if (head == "=") {
      if (list.items.size() != 3) fail("'=' takes exactly two arguments", list);
      return Expr::equals(parse_term(list.items[1], bound).first, parse_term(list.items[2], bound).first);
    }
    if (head == "when" || head == "preference" || head == "always" || head == "sometime") {
      fail("unsupported construct '" + head + "'", list);
    }
    return parse_atom(list, bound);
  }

  Expr parse_atom(const SExpr& list, const std::vector<TypedName>& bound) const {
    const std::string& pred = symbol_of(list.items.front(), "predicate");
    const PredicateSchema* schema = domain_.find_predicate(pred);
    if (schema == nullptr) fail("undeclared predicate '" + pred + "'", list);
    if (list.items.size() - 1 != schema->params.size()) {
      fail("arity mismatch for '" + pred + "': expected " + std::to_string(schema->params.size()) +
               ", got " + std::to_string(list.items.size() - 1),
           list);
    }
    std::vector<Term> terms;
    for (std::size_t i = 1; i < list.items.size(); ++i) {
      auto [term, type] = parse_term(list.items[i], bound);
      const std::string& expected = schema->params[i - 1].type;
      if (!domain_.is_subtype(type, expected) && !domain_.is_subtype(expected, type)) {
        fail("type mismatch: '" + term.name + "' of type '" + type + "' used as '" + expected +
                 "' in '" + pred + "'",
             list.items[i]);
      }
      terms.push_back(std::move(term));
    }
    return Expr::atom(pred, std::move(terms));
  }

  std::pair<Term, std::string> parse_term(const SExpr& s, const std::vector<TypedName>& bound) const {
    const std::string& name = symbol_of(s, "term");
    if (is_variable(name)) {
      for (auto it = bound.rbegin(); it != bound.rend(); ++it) {
        if (it->name == name) return {Term::var(name), it->type};
      }
      fail("unbound variable '" + name + "'", s);
    }
    auto it = objects_.find(name);
    if (it == objects_.end()) fail("unknown object '" + name + "'", s);
    return {Term::object(name), it->second};
  }

 private:
  const DomainModel& domain_;
  const std::map<std::string, std::string>& objects_;
};

const SExpr& single_define(const std::vector<SExpr>& top, const char* kind) {
  if (top.empty()) throw ParseError(std::string("empty ") + kind + " file", {1, 1});
  if (top.size() > 1) fail("unexpected content after '(define ...)'", top[1]);
  const SExpr& def = list_of(top.front(), "(define ...)");
  if (def.items.size() < 2 || !def.items.front().is_symbol("define")) fail("expected '(define ...)'", def);
  const SExpr& header = list_of(def.items[1], "header");
  if (header.items.size() != 2 || !header.items[0].is_symbol(kind)) {
    fail(std::string("expected '(") + kind + " <name>)'", header);
  }
  symbol_of(header.items[1], "name");
  return def;
}

void parse_effect(const SExpr& s, const ExprParser& parser, std::vector<TypedName>& params,
                  std::vector<Expr>& add, std::vector<Expr>& del) {
  const SExpr& list = list_of(s, "effect");
  if (list.items.empty()) return;
  const std::string& head = symbol_of(list.items.front(), "effect");
  if (head == "and") {
    for (std::size_t i = 1; i < list.items.size(); ++i) parse_effect(list.items[i], parser, params, add, del);
    return;
  }
  if (head == "not") {
    if (list.items.size() != 2) fail("'not' takes exactly one argument", list);
    const SExpr& inner = list_of(list.items[1], "atom");
    if (inner.items.empty()) fail("empty atom", inner);
    del.push_back(parser.parse_atom(inner, params));
    return;
  }
  if (head == "forall" || head == "when" || head == "increase" || head == "decrease" ||
      head == "assign") {
    fail("unsupported effect '" + head + "'", list);
  }
  add.push_back(parser.parse_atom(list, params));
}

std::map<std::string, std::string> constant_table(const DomainModel& d) {
  std::map<std::string, std::string> out;
  for (const auto& c : d.constants) out[c.name] = c.type;
  return out;
}

}  // namespace

DomainModel parse_domain(std::string_view text) {
  const auto top = read_sexprs(text);
  const SExpr& def = single_define(top, "domain");
  DomainModel d;
  d.name = def.items[1].items[1].symbol;

  for (std::size_t s = 2; s < def.items.size(); ++s) {
    const SExpr& section = list_of(def.items[s], "domain section");
    if (section.items.empty()) fail("empty section", section);
    const std::string& key = symbol_of(section.items.front(), "section keyword");
    if (key == ":requirements") {
      for (std::size_t i = 1; i < section.items.size(); ++i) {
        const std::string& r = symbol_of(section.items[i], "requirement");
        if (kSupportedRequirements.count(r) == 0) fail("unknown requirement flag '" + r + "'", section.items[i]);
        d.requirements.push_back(r);
      }
    } else if (key == ":types") {
      auto decls = parse_typed_list(section.items, 1, false, section);
      std::set<std::string> seen;
      for (const auto& t : decls) {
        if (t.name == "object") fail("'object' is the implicit root type", section);
        if (!seen.insert(t.name).second) fail("duplicate type '" + t.name + "'", section);
        if (t.name == t.type) fail("type '" + t.name + "' cannot be its own parent", section);
        d.types.push_back({t.name, t.type});
      }
      for (const auto& t : decls) {
        if (t.type != "object" && seen.insert(t.type).second) d.types.push_back({t.type, "object"});
      }
      for (const auto& t : d.types) {
        if (!d.is_subtype(t.name, "object")) fail("cyclic type hierarchy at '" + t.name + "'", section);
      }
    } else if (key == ":constants") {
      d.constants = parse_typed_list(section.items, 1, false, section);
      for (const auto& c : d.constants) {
        if (!d.has_type(c.type)) fail("undeclared type '" + c.type + "'", section);
      }
    } else if (key == ":predicates") {
      for (std::size_t i = 1; i < section.items.size(); ++i) {
        const SExpr& p = list_of(section.items[i], "predicate declaration");
        if (p.items.empty()) fail("empty predicate declaration", p);
        PredicateSchema schema;
        schema.name = symbol_of(p.items.front(), "predicate name");
        schema.params = parse_typed_list(p.items, 1, true, p);
        for (const auto& param : schema.params) {
          if (!d.has_type(param.type)) fail("undeclared type '" + param.type + "'", p);
        }
        if (d.find_predicate(schema.name) != nullptr) fail("duplicate predicate '" + schema.name + "'", p);
        d.predicates.push_back(std::move(schema));
      }
    } else if (key == ":action") {
      if (section.items.size() < 2) fail("action without name", section);
      ActionSchema a;
      a.name = symbol_of(section.items[1], "action name");
      if (d.find_action(a.name) != nullptr) fail("duplicate action '" + a.name + "'", section);
      const auto constants = constant_table(d);
      ExprParser parser(d, constants);
      for (std::size_t i = 2; i < section.items.size(); i += 2) {
        const std::string& field = symbol_of(section.items[i], "action field");
        if (i + 1 >= section.items.size()) fail("missing value for '" + field + "'", section.items[i]);
        const SExpr& value = section.items[i + 1];
        if (field == ":parameters") {
          a.params = parse_typed_list(list_of(value, "parameter list").items, 0, true, value);
          std::set<std::string> names;
          for (const auto& p : a.params) {
            if (!d.has_type(p.type)) fail("undeclared type '" + p.type + "'", value);
            if (!names.insert(p.name).second) fail("duplicate parameter '" + p.name + "'", value);
          }
        } else if (field == ":precondition") {
          a.precondition = parser.parse(value, a.params);
        } else if (field == ":effect") {
          parse_effect(value, parser, a.params, a.add_effects, a.delete_effects);
        } else {
          fail("unknown action field '" + field + "'", section.items[i]);
        }
      }
      d.actions.push_back(std::move(a));
    } else {
      fail("unsupported domain section '" + key + "'", section);
    }
  }
  return d;
}

SceneDescription parse_problem(std::string_view text, const DomainModel& domain) {
  const auto top = read_sexprs(text);
  const SExpr& def = single_define(top, "problem");
  SceneDescription scene;
  scene.name = def.items[1].items[1].symbol;
  scene.domain_name = domain.name;

  auto objects = constant_table(domain);
  bool saw_goal = false;
  for (std::size_t s = 2; s < def.items.size(); ++s) {
    const SExpr& section = list_of(def.items[s], "problem section");
    if (section.items.empty()) fail("empty section", section);
    const std::string& key = symbol_of(section.items.front(), "section keyword");
    if (key == ":domain") {
      if (section.items.size() != 2) fail("expected '(:domain <name>)'", section);
      const std::string& dn = symbol_of(section.items[1], "domain name");
      if (dn != domain.name) fail("problem targets domain '" + dn + "', expected '" + domain.name + "'", section);
    } else if (key == ":requirements") {
      for (std::size_t i = 1; i < section.items.size(); ++i) {
        const std::string& r = symbol_of(section.items[i], "requirement");
        if (kSupportedRequirements.count(r) == 0) fail("unknown requirement flag '" + r + "'", section.items[i]);
      }
    } else if (key == ":objects") {
      auto objs = parse_typed_list(section.items, 1, false, section);
      for (const auto& o : objs) {
        if (!domain.has_type(o.type)) fail("unknown object type '" + o.type + "' for '" + o.name + "'", section);
        if (!objects.emplace(o.name, o.type).second) fail("duplicate object '" + o.name + "'", section);
        scene.objects.push_back(o);
      }
    } else if (key == ":init") {
      for (std::size_t i = 1; i < section.items.size(); ++i) {
        const SExpr& a = list_of(section.items[i], "initial atom");
        if (a.items.empty()) fail("empty atom", a);
        if (a.items.front().is_symbol("not")) fail("negative literals are not allowed in :init", a);
        const std::string& pred = symbol_of(a.items.front(), "predicate");
        const PredicateSchema* schema = domain.find_predicate(pred);
        if (schema == nullptr) fail("atom uses undeclared predicate '" + pred + "'", a);
        if (a.items.size() - 1 != schema->params.size()) {
          fail("arity mismatch for '" + pred + "': expected " + std::to_string(schema->params.size()) +
                   ", got " + std::to_string(a.items.size() - 1),
               a);
        }
        GroundedAtom atom{pred, {}};
        for (std::size_t k = 1; k < a.items.size(); ++k) {
          const std::string& o = symbol_of(a.items[k], "object");
          auto it = objects.find(o);
          if (it == objects.end()) fail("unknown object '" + o + "'", a.items[k]);
          if (!domain.is_subtype(it->second, schema->params[k - 1].type)) {
            fail("type mismatch: '" + o + "' of type '" + it->second + "' used as '" +
                     schema->params[k - 1].type + "'",
                 a.items[k]);
          }
          atom.args.push_back(o);
        }
        scene.init.push_back(std::move(atom));
      }
    } else if (key == ":goal") {
      if (section.items.size() != 2) fail("expected '(:goal <expression>)'", section);
      ExprParser parser(domain, objects);
      std::vector<TypedName> bound;
      scene.goal = parser.parse(section.items[1], bound);
      saw_goal = true;
    } else {
      fail("unsupported problem section '" + key + "'", section);
    }
  }
  if (!saw_goal) fail("problem has no :goal", def);
  std::sort(scene.init.begin(), scene.init.end());
  scene.init.erase(std::unique(scene.init.begin(), scene.init.end()), scene.init.end());
  return scene;
}

namespace {

void print_typed(std::ostream& os, const std::vector<TypedName>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i != 0) os << ' ';
    os << names[i].name << " - " << names[i].type;
  }
}

void print_expr(std::ostream& os, const Expr& e) {
  switch (e.kind) {
    case ExprKind::Constant:
      os << (e.value ? "(and)" : "(or)");
      return;
    case ExprKind::Atom:
    case ExprKind::Attribute:
      os << '(' << e.name;
      for (const auto& t : e.args) os << ' ' << t.name;
      os << ')';
      return;
    case ExprKind::Equals:
      os << "(= " << e.args[0].name << ' ' << e.args[1].name << ')';
      return;
    case ExprKind::Not:
    case ExprKind::And:
    case ExprKind::Or:
    case ExprKind::Implies:
      os << '('
         << (e.kind == ExprKind::Not   ? "not"
             : e.kind == ExprKind::And ? "and"
             : e.kind == ExprKind::Or  ? "or"
                                       : "imply");
      for (const auto& c : e.children) {
        os << ' ';
        print_expr(os, c);
      }
      os << ')';
      return;
    case ExprKind::ForAll:
    case ExprKind::Exists:
      os << '(' << (e.kind == ExprKind::ForAll ? "forall" : "exists") << " (" << e.variable << " - "
         << (e.domain.kind == ObjectSet::Kind::Type ? e.domain.name : std::string("object")) << ") ";
      print_expr(os, e.children.front());
      os << ')';
      return;
  }
}

}  // namespace

std::string print_pddl_expr(const Expr& e) {
  std::ostringstream os;
  print_expr(os, e);
  return os.str();
}

std::string print_domain(const DomainModel& d) {
  std::ostringstream os;
  os << "(define (domain " << d.name << ")\n";
  if (!d.requirements.empty()) {
    os << "  (:requirements";
    for (const auto& r : d.requirements) os << ' ' << r;
    os << ")\n";
  }
  if (!d.types.empty()) {
    os << "  (:types";
    for (const auto& t : d.types) os << ' ' << t.name << " - " << t.parent;
    os << ")\n";
  }
  if (!d.constants.empty()) {
    os << "  (:constants ";
    print_typed(os, d.constants);
    os << ")\n";
  }
  os << "  (:predicates";
  for (const auto& p : d.predicates) {
    os << "\n    (" << p.name;
    if (!p.params.empty()) os << ' ';
    print_typed(os, p.params);
    os << ')';
  }
  os << ")\n";
  for (const auto& a : d.actions) {
    os << "  (:action " << a.name << "\n    :parameters (";
    print_typed(os, a.params);
    os << ")\n    :precondition ";
    print_expr(os, a.precondition);
    os << "\n    :effect (and";
    for (const auto& e : a.add_effects) {
      os << ' ';
      print_expr(os, e);
    }
    for (const auto& e : a.delete_effects) {
      os << " (not ";
      print_expr(os, e);
      os << ')';
    }
    os << "))\n";
  }
  os << ")\n";
  return os.str();
}

std::string print_problem(const SceneDescription& scene) {
  std::ostringstream os;
  os << "(define (problem " << scene.name << ")\n";
  os << "  (:domain " << scene.domain_name << ")\n";
  os << "  (:objects";
  for (const auto& o : scene.objects) os << ' ' << o.name << " - " << o.type;
  os << ")\n  (:init";
  for (const auto& a : scene.init) {
    os << "\n    (" << a.predicate;
    for (const auto& arg : a.args) os << ' ' << arg;
    os << ')';
  }
  os << ")\n  (:goal ";
  print_expr(os, scene.goal);
  os << "))\n";
  return os.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace castl::pddl

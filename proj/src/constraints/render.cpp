#include "castl/constraints/render.hpp"

#include "castl/util/strings.hpp"

namespace castl::constraints {

namespace {

using logic::ExprKind;

std::string fill(const std::string& tmpl, const std::vector<std::string>& args) {
  std::string out;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (tmpl[i] == '{' && i + 2 < tmpl.size() && std::isdigit(static_cast<unsigned char>(tmpl[i + 1])) &&
        tmpl[i + 2] == '}') {
      const std::size_t k = static_cast<std::size_t>(tmpl[i + 1] - '0');
      out += k < args.size() ? args[k] : "?";
      i += 2;
    } else {
      out.push_back(tmpl[i]);
    }
  }
  return out;
}

std::vector<std::string> names(const std::vector<logic::Term>& terms) {
  std::vector<std::string> out;
  for (const auto& t : terms) out.push_back(t.name);
  return out;
}

std::string sentence(std::string s) {
  if (!s.empty()) s[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(s[0])));
  return s + ".";
}

}  // namespace

std::string PhraseBook::atom(const std::string& predicate, const std::vector<std::string>& args) const {
  auto it = predicates.find(predicate);
  if (it == predicates.end()) return predicate + "(" + util::join(args, ", ") + ")";
  return fill(it->second, args);
}

std::string PhraseBook::action(const ActionPattern& p) const {
  std::vector<std::string> args;
  for (const auto& a : p.args) args.push_back(a ? *a : "any object");
  auto it = actions.find(p.action);
  if (it == actions.end()) return p.to_string();
  return fill(it->second, args);
}

std::string render_expr_nl(const Expr& e, const PhraseBook& ph) {
  switch (e.kind) {
    case ExprKind::Constant:
      return e.value ? "true" : "false";
    case ExprKind::Atom:
    case ExprKind::Attribute:
      return ph.atom(e.name, names(e.args));
    case ExprKind::Equals:
      return e.args[0].name + " is " + e.args[1].name;
    case ExprKind::Not: {
      const Expr& c = e.children.front();
      if (c.kind == ExprKind::Atom) return "it is not the case that " + ph.atom(c.name, names(c.args));
      return "not (" + render_expr_nl(c, ph) + ")";
    }
    case ExprKind::And:
    case ExprKind::Or: {
      std::vector<std::string> parts;
      for (const auto& c : e.children) {
        const bool nested = c.kind == ExprKind::And || c.kind == ExprKind::Or || c.kind == ExprKind::Implies;
        parts.push_back(nested ? "(" + render_expr_nl(c, ph) + ")" : render_expr_nl(c, ph));
      }
      return util::join(parts, e.kind == ExprKind::And ? " and " : " or ");
    }
    case ExprKind::Implies:
      return "if " + render_expr_nl(e.children[0], ph) + " then " + render_expr_nl(e.children[1], ph);
    case ExprKind::ForAll:
    case ExprKind::Exists:
      return std::string(e.kind == ExprKind::ForAll ? "for every " : "for some ") + e.variable + " in " +
             logic::to_string(e.domain) + ", " + render_expr_nl(e.children.front(), ph);
  }
  return {};
}

std::vector<std::string> render_constraints_nl(const ConstraintSet& set, const PhraseBook& ph) {
  std::vector<std::string> out;
  for (const auto& ev : set.eventuals) out.push_back(sentence("in the end, " + render_expr_nl(ev.expr, ph)));
  for (const auto& g : set.globals) {
    if (g.expr.kind == ExprKind::Not) {
      out.push_back(sentence("it must never happen that " + render_expr_nl(g.expr.children.front(), ph)));
    } else {
      out.push_back(sentence("at all times, " + render_expr_nl(g.expr, ph)));
    }
  }
  for (const auto& im : set.implications) {
    if (im.blocked_while.kind == ExprKind::Not) {
      out.push_back(sentence("do not " + ph.action(im.gate) + " until " +
                             render_expr_nl(im.blocked_while.children.front(), ph)));
    } else {
      out.push_back(sentence("do not " + ph.action(im.gate) + " while " + render_expr_nl(im.blocked_while, ph)));
    }
  }
  return out;
}

}  // namespace castl::constraints

#include "castl/constraints/script.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "castl/util/strings.hpp"

namespace castl::constraints {

namespace {

using logic::ExprKind;
using logic::ObjectSet;
using logic::Term;

enum class Tok { Ident, LParen, RParen, LBrace, RBrace, Comma, Semi, Star, End };

struct Token {
  Tok kind;
  std::string text;
  SourceLocation loc;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::Ident: return "'" + t.text + "'";
    case Tok::End: return "end of input";
    default: return "'" + t.text + "'";
  }
}

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' || c == '?';
}

std::vector<Token> lex(std::string_view text) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < text.size(); ++k, ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#' || (c == '/' && i + 1 < text.size() && text[i + 1] == '/')) {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    SourceLocation loc{line, col};
    static const std::map<char, Tok> punct = {{'(', Tok::LParen}, {')', Tok::RParen}, {'{', Tok::LBrace},
                                              {'}', Tok::RBrace}, {',', Tok::Comma},  {';', Tok::Semi},
                                              {'*', Tok::Star}};
    if (auto it = punct.find(c); it != punct.end()) {
      out.push_back({it->second, std::string(1, c), loc});
      advance(1);
      continue;
    }
    if (ident_char(c)) {
      std::size_t j = i;
      while (j < text.size() && ident_char(text[j])) ++j;
      std::string word = util::to_lower(std::string(text.substr(i, j - i)));
      // PDDL-style ?x variables are accepted; the '?' is dropped.
      if (word.size() > 1 && word.front() == '?') word.erase(0, 1);
      out.push_back({Tok::Ident, std::move(word), loc});
      advance(j - i);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", loc);
  }
  out.push_back({Tok::End, "", {line, col}});
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  Script script() {
    Script s;
    while (peek().kind != Tok::End) s.statements.push_back(statement());
    return s;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  Token next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  bool at_word(const char* w) const { return peek().kind == Tok::Ident && peek().text == w; }

  [[noreturn]] void fail(const std::string& expected) const {
    throw ParseError("expected " + expected + ", found " + describe(peek()), peek().loc);
  }

  Token expect(Tok kind, const std::string& what) {
    if (peek().kind != kind) fail(what);
    return next();
  }

  void expect_word(const char* w) {
    if (!at_word(w)) fail(std::string("'") + w + "'");
    next();
  }

  std::string ident(const std::string& what) { return expect(Tok::Ident, what).text; }

  bool bound(const std::string& name) const {
    for (const auto& v : scope_) {
      if (v == name) return true;
    }
    return false;
  }

  Statement statement() {
    Statement st;
    st.loc = peek().loc;
    if (at_word("block")) {
      next();
      st.kind = Statement::Kind::Block;
      st.pattern = pattern();
      expect_word("while");
      st.expr = expr();
    } else if (at_word("do")) {
      next();
      expect_word("not");
      st.kind = Statement::Kind::Block;
      st.pattern = pattern();
      expect_word("until");
      st.expr = Expr::negate(expr());
    } else if (at_word("always")) {
      next();
      st.kind = Statement::Kind::Always;
      st.expr = expr();
    } else if (at_word("never")) {
      next();
      st.kind = Statement::Kind::Always;
      st.expr = Expr::negate(expr());
    } else if (at_word("goal")) {
      next();
      st.kind = Statement::Kind::Goal;
      st.expr = expr();
    } else if (at_word("forall")) {
      next();
      st.kind = Statement::Kind::Loop;
      st.variable = ident("loop variable");
      expect_word("in");
      st.domain = object_set();
      expect(Tok::LBrace, "'{'");
      scope_.push_back(st.variable);
      while (peek().kind != Tok::RBrace) {
        if (peek().kind == Tok::End) fail("'}'");
        st.body.push_back(statement());
      }
      scope_.pop_back();
      next();
      return st;
    } else {
      fail("a statement (block, do not, always, never, goal, forall)");
    }
    if (peek().kind == Tok::Semi) next();
    return st;
  }

  ScriptPattern pattern() {
    ScriptPattern p;
    p.action = ident("action name");
    expect(Tok::LParen, "'('");
    if (peek().kind != Tok::RParen) {
      for (;;) {
        if (peek().kind == Tok::Star) {
          next();
          p.args.emplace_back(std::nullopt);
        } else {
          p.args.emplace_back(term());
        }
        if (peek().kind != Tok::Comma) break;
        next();
      }
    }
    expect(Tok::RParen, "')' or ','");
    return p;
  }

  Term term() {
    std::string name = ident("an object or variable");
    return bound(name) ? Term::var(std::move(name)) : Term::object(std::move(name));
  }

  std::vector<std::string> brace_list() {
    expect(Tok::LBrace, "'{'");
    std::vector<std::string> out;
    if (peek().kind != Tok::RBrace) {
      for (;;) {
        out.push_back(ident("object name"));
        if (peek().kind != Tok::Comma) break;
        next();
      }
    }
    expect(Tok::RBrace, "'}' or ','");
    return out;
  }

  ObjectSet object_set() {
    ObjectSet set;
    if (peek().kind == Tok::LBrace) {
      set = ObjectSet::explicit_list(brace_list());
    } else {
      set.kind = ObjectSet::Kind::Named;
      set.name = ident("a set name or '{'");
    }
    if (at_word("except")) {
      next();
      set.excluded = brace_list();
    }
    return set;
  }

  std::vector<Expr> expr_list() {
    expect(Tok::LParen, "'('");
    std::vector<Expr> out;
    if (peek().kind != Tok::RParen) {
      for (;;) {
        out.push_back(expr());
        if (peek().kind != Tok::Comma) break;
        next();
      }
    }
    expect(Tok::RParen, "')' or ','");
    return out;
  }

  Expr expr() {
    if (peek().kind == Tok::LParen) {
      next();
      Expr e = expr();
      expect(Tok::RParen, "')'");
      return e;
    }
    if (peek().kind != Tok::Ident) fail("an expression");
    const Token head = peek();
    const bool call = peek(1).kind == Tok::LParen;
    if (head.text == "true" && !call) {
      next();
      return Expr::constant(true);
    }
    if (head.text == "false" && !call) {
      next();
      return Expr::constant(false);
    }
    if (head.text == "not") {
      next();
      return Expr::negate(expr());
    }
    if ((head.text == "and" || head.text == "or") && call) {
      next();
      std::vector<Expr> parts = expr_list();
      if (parts.empty()) return Expr::constant(head.text == "and");
      if (parts.size() == 1) return std::move(parts.front());
      return head.text == "and" ? Expr::conjunction(std::move(parts)) : Expr::disjunction(std::move(parts));
    }
    if (head.text == "implies" && call) {
      next();
      std::vector<Expr> parts = expr_list();
      if (parts.size() != 2) throw ParseError("implies takes exactly two arguments", head.loc);
      return Expr::implies(std::move(parts[0]), std::move(parts[1]));
    }
    if ((head.text == "forall" || head.text == "exists") && !call) {
      next();
      std::string var = ident("quantified variable");
      expect_word("in");
      ObjectSet set = object_set();
      expect(Tok::LBrace, "'{'");
      scope_.push_back(var);
      Expr body = expr();
      scope_.pop_back();
      expect(Tok::RBrace, "'}'");
      return head.text == "forall" ? Expr::forall(std::move(var), std::move(set), std::move(body))
                                   : Expr::exists(std::move(var), std::move(set), std::move(body));
    }
    if (!call) throw ParseError("expected '(' after '" + head.text + "'", peek(1).loc);
    next();
    next();
    std::vector<Term> args;
    if (peek().kind != Tok::RParen) {
      for (;;) {
        args.push_back(term());
        if (peek().kind != Tok::Comma) break;
        next();
      }
    }
    expect(Tok::RParen, "')' or ','");
    return Expr::atom(head.text, std::move(args));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::string> scope_;
};

using Bindings = std::vector<std::pair<std::string, std::string>>;

Expr bind_vars(Expr e, const Bindings& env) {
  // Innermost binding wins, so substitute from the innermost loop outwards.
  for (auto it = env.rbegin(); it != env.rend(); ++it) e = logic::substitute(e, it->first, it->second);
  return e;
}

std::string lookup(const Term& t, const Bindings& env, SourceLocation loc) {
  if (!t.variable) return t.name;
  for (auto it = env.rbegin(); it != env.rend(); ++it) {
    if (it->first == t.name) return it->second;
  }
  throw ParseError("unbound variable '" + t.name + "'", loc);
}

std::string where(const Statement& st) { return "script:" + st.loc.str(); }

void expand(const Statement& st, const GroundedTask& task, Bindings& env, ConstraintSet& out) {
  switch (st.kind) {
    case Statement::Kind::Block: {
      ActionPattern gate{st.pattern.action, {}};
      for (const auto& a : st.pattern.args) {
        if (a) {
          gate.args.emplace_back(lookup(*a, env, st.loc));
        } else {
          gate.args.emplace_back(std::nullopt);
        }
      }
      // A loop may instantiate a gate that no grounded action matches (e.g. rooms that are
      // not connected); that instance is dropped with a warning instead of failing.
      const bool from_loop = !env.empty();
      const auto* schema = task.domain().find_action(gate.action);
      if (from_loop && schema != nullptr && schema->params.size() == gate.args.size() &&
          std::none_of(task.actions().begin(), task.actions().end(),
                       [&](const pddl::GroundedAction& a) { return gate.matches(a); })) {
        out.warnings.push_back(where(st) + ": " + gate.to_string() + " matches no grounded action and was skipped");
        return;
      }
      out.implications.push_back({std::move(gate), bind_vars(st.expr, env), where(st)});
      return;
    }
    case Statement::Kind::Always:
      out.globals.push_back({bind_vars(st.expr, env), where(st)});
      return;
    case Statement::Kind::Goal:
      out.eventuals.push_back({bind_vars(st.expr, env), where(st)});
      return;
    case Statement::Kind::Loop: {
      std::vector<std::string> objects;
      try {
        objects = task.objects_in(st.domain);
      } catch (const ValidationError& e) {
        throw ParseError(e.what(), st.loc);
      }
      if (objects.empty()) {
        out.warnings.push_back(where(st) + ": loop over empty set '" + logic::to_string(st.domain) +
                               "' produced no constraints");
      }
      for (const auto& o : objects) {
        env.emplace_back(st.variable, o);
        for (const auto& inner : st.body) expand(inner, task, env, out);
        env.pop_back();
      }
      return;
    }
  }
}

}  // namespace

Script parse_script(std::string_view text) { return Parser(lex(text)).script(); }

ConstraintSet expand_script(const Script& script, const GroundedTask& task) {
  ConstraintSet out;
  Bindings env;
  for (const auto& st : script.statements) expand(st, task, env, out);
  return out;
}

ConstraintSet parse_constraint_script(std::string_view text, const GroundedTask& task) {
  return resolve_attributes(expand_script(parse_script(text), task), task);
}

std::string write_constraint_script(const ConstraintSet& set) {
  std::ostringstream os;
  for (const auto& e : set.eventuals) os << "goal " << logic::to_string(e.expr) << "\n";
  for (const auto& g : set.globals) os << "always " << logic::to_string(g.expr) << "\n";
  for (const auto& im : set.implications) {
    os << "block " << im.gate.to_string() << " while " << logic::to_string(im.blocked_while) << "\n";
  }
  return os.str();
}

}  // namespace castl::constraints

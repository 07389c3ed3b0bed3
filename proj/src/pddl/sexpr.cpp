#include "castl/pddl/sexpr.hpp"

#include <cctype>

namespace castl::pddl {

namespace {

bool is_symbol_char(char c) {
  if (std::isalnum(static_cast<unsigned char>(c))) return true;
  switch (c) {
    case '-':
    case '_':
    case '?':
    case ':':
    case '=':
    case '.':
    case '<':
    case '>':
    case '+':
    case '*':
    case '/':
    case '!':
      return true;
    default:
      return false;
  }
}

}  // namespace

std::vector<SExpr> read_sexprs(std::string_view text) {
  std::vector<SExpr> top;
  std::vector<SExpr> stack;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](char c) {
    ++i;
    if (c == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  };

  while (i < text.size()) {
    const char c = text[i];
    if (c == ';') {
      while (i < text.size() && text[i] != '\n') advance(text[i]);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(c);
      continue;
    }
    const SourceLocation loc{line, col};
    if (c == '(') {
      SExpr list;
      list.is_list = true;
      list.loc = loc;
      stack.push_back(std::move(list));
      advance(c);
      continue;
    }
    if (c == ')') {
      if (stack.empty()) throw ParseError("unexpected ')'", loc);
      SExpr done = std::move(stack.back());
      stack.pop_back();
      if (stack.empty()) {
        top.push_back(std::move(done));
      } else {
        stack.back().items.push_back(std::move(done));
      }
      advance(c);
      continue;
    }
    if (!is_symbol_char(c)) {
      throw ParseError(std::string("unexpected character '") + c + "'", loc);
    }
    SExpr sym;
    sym.loc = loc;
    while (i < text.size() && is_symbol_char(text[i])) {
      sym.symbol.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[i]))));
      advance(text[i]);
    }
    if (stack.empty()) {
      top.push_back(std::move(sym));
    } else {
      stack.back().items.push_back(std::move(sym));
    }
  }
  if (!stack.empty()) throw ParseError("unterminated '('", stack.back().loc);
  return top;
}

}  // namespace castl::pddl

#include "castl/logic/formula.hpp"

namespace castl::logic {

std::vector<AtomId> State::true_atoms() const {
  std::vector<AtomId> out;
  for (std::size_t w = 0; w < words_.size(); ++w) {
    std::uint64_t bits = words_[w];
    while (bits != 0) {
      const int bit = __builtin_ctzll(bits);
      out.push_back(static_cast<AtomId>(w * 64 + bit));
      bits &= bits - 1;
    }
  }
  return out;
}

std::size_t StateHash::operator()(const State& s) const noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint64_t w : s.words()) {
    h ^= w + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

Formula Formula::negate(Formula f) {
  switch (f.op) {
    case Op::True:
      return constant(false);
    case Op::False:
      return constant(true);
    case Op::Not:
      return std::move(f.kids.front());
    default:
      return {Op::Not, 0, {std::move(f)}};
  }
}

Formula Formula::conjunction(std::vector<Formula> kids) {
  std::vector<Formula> kept;
  for (auto& k : kids) {
    if (k.is_false()) return constant(false);
    if (k.is_true()) continue;
    if (k.op == Op::And) {
      for (auto& g : k.kids) kept.push_back(std::move(g));
    } else {
      kept.push_back(std::move(k));
    }
  }
  if (kept.empty()) return constant(true);
  if (kept.size() == 1) return std::move(kept.front());
  return {Op::And, 0, std::move(kept)};
}

Formula Formula::disjunction(std::vector<Formula> kids) {
  std::vector<Formula> kept;
  for (auto& k : kids) {
    if (k.is_true()) return constant(true);
    if (k.is_false()) continue;
    if (k.op == Op::Or) {
      for (auto& g : k.kids) kept.push_back(std::move(g));
    } else {
      kept.push_back(std::move(k));
    }
  }
  if (kept.empty()) return constant(false);
  if (kept.size() == 1) return std::move(kept.front());
  return {Op::Or, 0, std::move(kept)};
}

bool evaluate(const Formula& f, const State& s) {
  switch (f.op) {
    case Formula::Op::True:
      return true;
    case Formula::Op::False:
      return false;
    case Formula::Op::Lit:
      return s.test(f.atom);
    case Formula::Op::Not:
      return !evaluate(f.kids.front(), s);
    case Formula::Op::And:
      for (const auto& k : f.kids) {
        if (!evaluate(k, s)) return false;
      }
      return true;
    case Formula::Op::Or:
      for (const auto& k : f.kids) {
        if (evaluate(k, s)) return true;
      }
      return false;
  }
  return false;
}

namespace {

bool add_literal(const Formula& f, std::vector<AtomId>& pos, std::vector<AtomId>& neg) {
  if (f.op == Formula::Op::Lit) {
    pos.push_back(f.atom);
    return true;
  }
  if (f.op == Formula::Op::Not && f.kids.front().op == Formula::Op::Lit) {
    neg.push_back(f.kids.front().atom);
    return true;
  }
  return false;
}

}  // namespace

bool as_literal_conjunction(const Formula& f, std::vector<AtomId>& positive,
                            std::vector<AtomId>& negative) {
  positive.clear();
  negative.clear();
  if (f.is_true()) return true;
  if (f.op != Formula::Op::And) return add_literal(f, positive, negative);
  for (const auto& k : f.kids) {
    if (!add_literal(k, positive, negative)) return false;
  }
  return true;
}

}  // namespace castl::logic

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "castl/logic/expr.hpp"

namespace castl::logic {

/// Dense truth assignment over the fluent atoms of a grounded task.
class State {
 public:
  State() = default;
  explicit State(std::size_t num_atoms) : size_(num_atoms), words_((num_atoms + 63) / 64, 0) {}

  std::size_t size() const { return size_; }
  bool test(AtomId id) const { return (words_[id >> 6] >> (id & 63)) & 1U; }
  void set(AtomId id, bool value = true) {
    if (value) {
      words_[id >> 6] |= (std::uint64_t{1} << (id & 63));
    } else {
      words_[id >> 6] &= ~(std::uint64_t{1} << (id & 63));
    }
  }

  /// Sorted ids of the true atoms.
  std::vector<AtomId> true_atoms() const;

  const std::vector<std::uint64_t>& words() const { return words_; }

  bool operator==(const State&) const = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

struct StateHash {
  std::size_t operator()(const State& s) const noexcept;
};

/// A ground formula whose leaves reference fluent atoms by id. Static atoms and attribute
/// literals have already been folded into constants.
struct Formula {
  enum class Op { True, False, Lit, Not, And, Or };

  Op op = Op::True;
  AtomId atom = 0;
  std::vector<Formula> kids;

  static Formula constant(bool v) { return {v ? Op::True : Op::False, 0, {}}; }
  static Formula lit(AtomId id) { return {Op::Lit, id, {}}; }
  static Formula negate(Formula f);
  static Formula conjunction(std::vector<Formula> kids);
  static Formula disjunction(std::vector<Formula> kids);

  bool is_true() const { return op == Op::True; }
  bool is_false() const { return op == Op::False; }

  bool operator==(const Formula&) const = default;
};

bool evaluate(const Formula& f, const State& s);

/// If `f` is a conjunction of literals, fills the positive/negative atom lists and returns
/// true.
bool as_literal_conjunction(const Formula& f, std::vector<AtomId>& positive,
                            std::vector<AtomId>& negative);

}  // namespace castl::logic

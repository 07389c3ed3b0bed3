#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "castl/util/deadline.hpp"

namespace castl::sat {

using Var = int;

/// Literal encoded as 2*var + sign.
struct Lit {
  int code = -1;

  static Lit pos(Var v) { return {2 * v}; }
  static Lit neg(Var v) { return {2 * v + 1}; }
  static Lit make(Var v, bool negated) { return {2 * v + (negated ? 1 : 0)}; }

  Var var() const { return code >> 1; }
  bool negated() const { return (code & 1) != 0; }
  Lit operator~() const { return {code ^ 1}; }
  bool operator==(const Lit&) const = default;
};

enum class Result { Sat, Unsat, Unknown };

struct SolverStats {
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
};

/// Incremental CDCL solver: two watched literals, first-UIP learning, VSIDS, phase
/// saving, Luby restarts, LBD-based clause deletion, and solving under assumptions.
/// Clauses may be added between solve() calls.
class Solver {
 public:
  explicit Solver(std::uint64_t seed = 0);

  Var new_var();
  int num_vars() const { return static_cast<int>(assigns_.size()); }
  std::size_t num_clauses() const { return clauses_.size(); }

  /// Returns false when the formula became unsatisfiable at the top level.
  bool add_clause(std::vector<Lit> lits);
  bool add_clause(std::initializer_list<Lit> lits) { return add_clause(std::vector<Lit>(lits)); }

  /// Unsat means unsatisfiable under the given assumptions; Unknown means the deadline
  /// expired first.
  Result solve(const std::vector<Lit>& assumptions = {}, const util::Deadline& deadline = util::Deadline::never());

  /// Model of the last Sat answer.
  bool model_value(Var v) const { return model_[static_cast<std::size_t>(v)] == 1; }
  bool model_value(Lit l) const { return model_value(l.var()) != l.negated(); }

  bool okay() const { return ok_; }
  const SolverStats& stats() const { return stats_; }

 private:
  struct Clause {
    std::vector<Lit> lits;
    bool learnt = false;
    int lbd = 0;
    double activity = 0;
  };

  static constexpr std::int8_t kUndef = -1;

  std::int8_t value(Lit l) const {
    const std::int8_t a = assigns_[static_cast<std::size_t>(l.var())];
    return a == kUndef ? kUndef : static_cast<std::int8_t>(a ^ static_cast<std::int8_t>(l.negated()));
  }
  int decision_level() const { return static_cast<int>(trail_lim_.size()); }

  void enqueue(Lit l, int reason);
  int propagate();
  void analyze(int confl, std::vector<Lit>& learnt, int& backtrack_level, int& lbd);
  bool redundant(Lit l) const;
  void cancel_until(int level);
  Lit pick_branch();
  void attach(int ci);
  void reduce_db();

  void bump_var(Var v);
  void bump_clause(Clause& c);

  // binary max-heap over activity
  void heap_insert(Var v);
  void heap_up(int pos);
  void heap_down(int pos);
  Var heap_pop();
  bool heap_contains(Var v) const { return heap_pos_[static_cast<std::size_t>(v)] >= 0; }

  bool ok_ = true;
  std::vector<Clause> clauses_;
  std::vector<std::vector<int>> watches_;
  std::vector<std::int8_t> assigns_;
  std::vector<std::int8_t> polarity_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<char> seen_;
  std::vector<double> activity_;
  std::vector<Var> heap_;
  std::vector<int> heap_pos_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;
  std::vector<std::int8_t> model_;

  double var_inc_ = 1.0;
  double cla_inc_ = 1.0;
  std::size_t learnt_count_ = 0;
  std::size_t max_learnts_ = 8000;
  std::mt19937_64 rng_;
  SolverStats stats_;
};

}  // namespace castl::sat

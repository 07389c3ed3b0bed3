#include <gtest/gtest.h>

#include "castl/planner/constraint_stack.hpp"
#include "castl/sat/solver.hpp"
#include "castl/util/rng.hpp"

using namespace castl;
using sat::Lit;

namespace {

using Cnf = std::vector<std::vector<Lit>>;

Cnf random_cnf(util::Rng& rng, int vars, int clauses) {
  Cnf f;
  for (int i = 0; i < clauses; ++i) {
    std::vector<Lit> c;
    for (int k = 0; k < 3; ++k) c.push_back(Lit::make(static_cast<int>(rng.below(vars)), rng.chance(50)));
    f.push_back(c);
  }
  return f;
}

bool brute_force(const Cnf& f, int vars, const std::vector<Lit>& assumptions = {}) {
  for (std::uint32_t m = 0; m < (1u << vars); ++m) {
    auto val = [&](Lit l) { return (((m >> l.var()) & 1u) != 0) != l.negated(); };
    bool ok = true;
    for (auto a : assumptions) ok = ok && val(a);
    for (const auto& c : f) {
      if (!ok) break;
      bool sat = false;
      for (auto l : c) sat = sat || val(l);
      ok = sat;
    }
    if (ok) return true;
  }
  return false;
}

bool model_satisfies(const sat::Solver& s, const Cnf& f) {
  for (const auto& c : f) {
    bool sat = false;
    for (auto l : c) sat = sat || s.model_value(l);
    if (!sat) return false;
  }
  return true;
}

}  // namespace

TEST(Solver, AgreesWithBruteForceOnRandom3Cnf) {
  util::Rng rng(7);
  int sat_count = 0;
  for (int round = 0; round < 300; ++round) {
    const int vars = 4 + static_cast<int>(rng.below(9));
    const Cnf f = random_cnf(rng, vars, static_cast<int>(vars * 4.3));
    sat::Solver s(round);
    for (int v = 0; v < vars; ++v) s.new_var();
    for (const auto& c : f) s.add_clause(c);
    const bool expected = brute_force(f, vars);
    const auto r = s.solve();
    ASSERT_EQ(r == sat::Result::Sat, expected) << "round " << round;
    if (expected) {
      EXPECT_TRUE(model_satisfies(s, f));
      ++sat_count;
    }
  }
  EXPECT_GT(sat_count, 20);
  EXPECT_LT(sat_count, 280);
}

TEST(Solver, IncrementalWithAssumptions) {
  util::Rng rng(11);
  for (int round = 0; round < 100; ++round) {
    const int vars = 8;
    sat::Solver s(1);
    for (int v = 0; v < vars; ++v) s.new_var();
    Cnf f;
    for (int batch = 0; batch < 4; ++batch) {
      for (const auto& c : random_cnf(rng, vars, 6)) {
        f.push_back(c);
        s.add_clause(c);
      }
      const std::vector<Lit> assume = {Lit::make(static_cast<int>(rng.below(vars)), rng.chance(50)),
                                       Lit::make(static_cast<int>(rng.below(vars)), rng.chance(50))};
      const bool expected = brute_force(f, vars, assume);
      const auto r = s.solve(assume);
      ASSERT_EQ(r == sat::Result::Sat, expected);
      if (expected) {
        EXPECT_TRUE(model_satisfies(s, f));
        for (auto a : assume) EXPECT_TRUE(s.model_value(a));
      }
    }
  }
}

TEST(Solver, PigeonholeIsUnsat) {
  // 6 pigeons, 5 holes
  const int p = 6, h = 5;
  sat::Solver s;
  auto var = [&](int i, int j) { return i * h + j; };
  for (int v = 0; v < p * h; ++v) s.new_var();
  for (int i = 0; i < p; ++i) {
    std::vector<Lit> c;
    for (int j = 0; j < h; ++j) c.push_back(Lit::pos(var(i, j)));
    s.add_clause(c);
  }
  for (int j = 0; j < h; ++j) {
    for (int a = 0; a < p; ++a) {
      for (int b = a + 1; b < p; ++b) s.add_clause({Lit::neg(var(a, j)), Lit::neg(var(b, j))});
    }
  }
  EXPECT_EQ(s.solve(), sat::Result::Unsat);
}

TEST(Solver, ExpiredDeadlineGivesUnknown) {
  util::Rng rng(3);
  sat::Solver s;
  const int vars = 200;
  for (int v = 0; v < vars; ++v) s.new_var();
  for (const auto& c : random_cnf(rng, vars, 860)) s.add_clause(c);
  EXPECT_EQ(s.solve({}, util::Deadline::after(0)), sat::Result::Unknown);
}

TEST(ConstraintStack, PopRestoresAnswers) {
  sat::Solver s;
  planner::ConstraintStack stack(s);
  const auto x = s.new_var();
  const auto y = s.new_var();
  stack.add(0, {Lit::pos(x), Lit::pos(y)});
  auto probe = [&](std::vector<Lit> extra) {
    auto a = stack.assumptions();
    a.insert(a.end(), extra.begin(), extra.end());
    return s.solve(a);
  };
  const auto before_nx = probe({Lit::neg(x)});
  const auto before_both = probe({Lit::neg(x), Lit::neg(y)});
  stack.push("task");
  stack.add({Lit::pos(x)});
  EXPECT_EQ(probe({Lit::neg(x)}), sat::Result::Unsat);
  stack.push("motion");
  stack.add({Lit::neg(y)});
  EXPECT_EQ(probe({}), sat::Result::Sat);
  EXPECT_EQ(stack.depth(), 3u);
  EXPECT_EQ(stack.clause_count(2), 1u);
  stack.pop();
  stack.pop();
  EXPECT_EQ(probe({Lit::neg(x)}), before_nx);
  EXPECT_EQ(probe({Lit::neg(x), Lit::neg(y)}), before_both);
  EXPECT_EQ(stack.depth(), 1u);
}

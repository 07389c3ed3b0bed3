#include <gtest/gtest.h>

#include <filesystem>

#include "castl/bench/domains.hpp"
#include "castl/constraints/builder.hpp"
#include "castl/constraints/json_format.hpp"
#include "castl/constraints/render.hpp"
#include "castl/constraints/script.hpp"
#include "castl/util/rng.hpp"
#include "castl/pddl/parser.hpp"
#include "support.hpp"

using namespace castl;
using namespace castl::constraints;
using castl::testing::load_fixture;
using castl::testing::load_text;
using castl::testing::read_fixture;
using logic::Expr;
using logic::GroundedAtom;

namespace {

const std::string kBw(bench::domain_pddl(bench::Domain::BW));

std::unique_ptr<castl::testing::Loaded> six_blocks() {
  return load_fixture("domains/bw.pddl", "bw/six_blocks.pddl", "bw/six_blocks_scene.json");
}

std::unique_ptr<castl::testing::Loaded> house_rules_house() {
  return load_fixture("domains/hc.pddl", "hc/house_rules_problem.pddl", "hc/house_rules_scene.json");
}

ConstraintSet house_rules_by_builder(const GroundedTask& task) {
  ConstraintBuilder pd(task);
  std::vector<Expr> visited;
  for (const std::string room : {"kitchen", "bedroom1", "bedroom2", "restroom"}) {
    visited.push_back(pd.make_grounded_predicate("visited", {"robot1", room}));
  }
  ConstraintSet set;
  const auto gate = pd.make_action_assignment("move", {"robot1", "living-room", "backyard"});
  set.add(pd.block_expression_action(gate, pd.make_not(pd.make_and(visited))));
  return resolve_attributes(set, task);
}

// Random complete assignment over a fixed atom list.
std::map<GroundedAtom, bool> random_state(const std::vector<GroundedAtom>& atoms, util::Rng& rng) {
  std::map<GroundedAtom, bool> s;
  for (const auto& a : atoms) s[a] = rng.chance(50);
  return s;
}

Expr random_expr(const std::vector<GroundedAtom>& atoms, util::Rng& rng, int depth) {
  if (depth == 0 || rng.chance(25)) return Expr::atom(rng.pick(atoms));
  switch (rng.below(4)) {
    case 0: return Expr::negate(random_expr(atoms, rng, depth - 1));
    case 1: return Expr::conjunction({random_expr(atoms, rng, depth - 1), random_expr(atoms, rng, depth - 1)});
    case 2: return Expr::disjunction({random_expr(atoms, rng, depth - 1), random_expr(atoms, rng, depth - 1)});
    default: return Expr::implies(random_expr(atoms, rng, depth - 1), random_expr(atoms, rng, depth - 1));
  }
}

}  // namespace

TEST(Builder, GroundedPredicate) {
  const auto l = house_rules_house();
  ConstraintBuilder pd(*l->task);
  EXPECT_EQ(pd.make_grounded_predicate("visited", {"robot1", "backyard"}),
            Expr::atom(GroundedAtom{"visited", {"robot1", "backyard"}}));
  EXPECT_THROW(pd.make_grounded_predicate("visitted", {"robot1", "backyard"}), ValidationError);
  EXPECT_THROW(pd.make_grounded_predicate("visited", {"robot1"}), ValidationError);
  EXPECT_THROW(pd.make_grounded_predicate("visited", {"robot1", "garage"}), ValidationError);
  EXPECT_THROW(pd.make_action_assignment("move", {"robot1", "living-room"}), ValidationError);
}

TEST(Builder, EmptyConjunctionIsTrue) { EXPECT_TRUE(ConstraintBuilder::make_and({}).is_constant(true)); }

TEST(Builder, GateWithoutMatchNamesAlternatives) {
  const auto l = house_rules_house();
  ConstraintBuilder pd(*l->task);
  // bedroom1 and bedroom2 are not connected, so no grounded move exists
  try {
    pd.block_expression_action(pd.make_action_assignment("move", {"robot1", "bedroom1", "bedroom2"}),
                               Expr::constant(true));
    FAIL() << "expected ValidationError";
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("move("), std::string::npos) << e.what();
  }
}

TEST(Expressions, DoubleNegationAndDeMorgan) {
  std::vector<GroundedAtom> atoms;
  for (int i = 0; i < 5; ++i) atoms.push_back({"p", {"o" + std::to_string(i)}});
  util::Rng rng(42);
  for (int round = 0; round < 300; ++round) {
    const Expr a = random_expr(atoms, rng, 3);
    const Expr b = random_expr(atoms, rng, 3);
    const auto s = random_state(atoms, rng);
    auto holds = [&](const GroundedAtom& x) { return s.at(x); };
    const bool va = logic::evaluate(a, holds);
    const bool vb = logic::evaluate(b, holds);
    EXPECT_EQ(logic::evaluate(Expr::negate(Expr::negate(a)), holds), va);
    EXPECT_EQ(logic::evaluate(Expr::conjunction({a, b}), holds), va && vb);
    EXPECT_EQ(logic::evaluate(Expr::negate(Expr::conjunction({a, b})), holds),
              logic::evaluate(Expr::disjunction({Expr::negate(a), Expr::negate(b)}), holds));
    EXPECT_EQ(logic::evaluate(Expr::negate(Expr::disjunction({a, b})), holds),
              logic::evaluate(Expr::conjunction({Expr::negate(a), Expr::negate(b)}), holds));
    EXPECT_EQ(logic::evaluate(logic::to_nnf(a), holds), va);
    EXPECT_EQ(logic::evaluate(logic::canonicalize(a), holds), va);
    EXPECT_EQ(logic::canonicalize(logic::canonicalize(a)), logic::canonicalize(a));
  }
}

TEST(HouseRules, BuilderScriptAndJsonAgree) {
  const auto l = house_rules_house();
  const auto built = house_rules_by_builder(*l->task);
  EXPECT_EQ(built.implications.size(), 4u);
  for (const auto& imp : built.implications) {
    EXPECT_EQ(imp.gate.to_string(), "move(robot1, living-room, backyard)");
  }
  const auto script = parse_constraint_script(read_fixture("hc/house_rules.cstl"), *l->task);
  const auto loop = parse_constraint_script(read_fixture("hc/house_rules_loop.cstl"), *l->task);
  const auto json = parse_constraint_json(read_fixture("pairs/hc/13-house_rules.json"), *l->task);
  EXPECT_TRUE(equivalent(built, script));
  EXPECT_TRUE(equivalent(built, loop));
  EXPECT_TRUE(equivalent(built, json));
}

TEST(FlatJson, ExactTextParses) {
  const auto l = six_blocks();
  const auto set = parse_constraint_json(read_fixture("bw/flat_json.json"), *l->task);
  ASSERT_EQ(set.implications.size(), 1u);
  ASSERT_EQ(set.globals.size(), 1u);
  EXPECT_EQ(set.implications[0].gate.to_string(), "pick-up(block0, table0)");
  EXPECT_EQ(set.implications[0].blocked_while, Expr::atom(GroundedAtom{"on", {"block4", "block5"}}));
  EXPECT_EQ(set.globals[0].expr, Expr::negate(Expr::atom(GroundedAtom{"on_table", {"block0", "table1"}})));
}

TEST(JsonFormat, EmptyAndErrors) {
  const auto l = six_blocks();
  EXPECT_TRUE(parse_constraint_json("[]", *l->task).empty());
  EXPECT_THROW(parse_constraint_json(R"([{"type": "sometimes", "condition": [["clear", "block0"]]}])", *l->task),
               Error);
  EXPECT_THROW(parse_constraint_json(R"([{"type": "global", "condition": ["clear", "block0"]}])", *l->task), Error);
  EXPECT_THROW(parse_constraint_json(R"([{"type": "global", "condition": [["shiny", "block0"]]}])", *l->task),
               Error);
  EXPECT_THROW(parse_constraint_json(R"([{"type": "global", "condition": [["clear", "block9"]]}])", *l->task),
               Error);
  EXPECT_THROW(parse_constraint_json(R"({"type": "global"})", *l->task), Error);
  EXPECT_THROW(parse_constraint_json("[{", *l->task), Error);
}

TEST(JsonFormat, WriteRoundTrip) {
  const auto l = six_blocks();
  for (const auto& entry : std::filesystem::directory_iterator(castl::testing::fixture_path("pairs/bw"))) {
    if (entry.path().extension() != ".json") continue;
    const auto set = parse_constraint_json(pddl::read_file(entry.path().string()), *l->task);
    EXPECT_TRUE(equivalent(parse_constraint_json(write_constraint_json(set), *l->task), set)) << entry.path();
  }
}

TEST(Script, SingleGlobal) {
  const auto l = six_blocks();
  const auto set = parse_constraint_script("always not(on_table(block0, table1))", *l->task);
  ASSERT_EQ(set.size(), 1u);
  ASSERT_EQ(set.globals.size(), 1u);
}

TEST(Script, AttributeLoopExpandsPerMatchingAction) {
  const auto l = load_text(kBw,
                           "(define (problem p) (:domain blocksworld) (:objects b1 b2 b3 block4 block5 - block"
                           " t0 t1 t2 - table) (:init (arm-empty) (on_table block5 t0) (on block4 block5)"
                           " (clear block4) (on_table b1 t0) (on_table b2 t1) (on_table b3 t2) (clear b1)"
                           " (clear b2) (clear b3)) (:goal (arm-empty)))",
                           R"({"attributes": {"red": ["b1", "b2"]}})");
  const auto set = parse_constraint_script("forall b in red { block pick-up(b, *) while on(block4, block5) }", *l->task);
  // enumerate: |red| x |tables|
  std::size_t expected = 0;
  for (const auto& a : l->task->actions()) expected += a.name == "pick-up" && (a.args[0] == "b1" || a.args[0] == "b2");
  EXPECT_EQ(expected, 6u);
  EXPECT_EQ(set.implications.size(), expected);
}

TEST(Script, SurfaceFormsAgree) {
  const auto l = six_blocks();
  const auto& task = *l->task;
  EXPECT_TRUE(equivalent(parse_constraint_script("never holding(block1)", task),
                         parse_constraint_script("always not(holding(block1))", task)));
  EXPECT_TRUE(equivalent(parse_constraint_script("do not stack(block1, block2) until clear(block3)", task),
                         parse_constraint_script("block stack(block1, block2) while not(clear(block3))", task)));
  EXPECT_TRUE(equivalent(parse_constraint_script("always implies(holding(block1), clear(block2));", task),
                         parse_constraint_script("always or(not(holding(block1)), clear(block2))", task)));
}

TEST(Script, SyntaxErrorsCarryPositions) {
  const auto l = six_blocks();
  try {
    parse_constraint_script("never holding(block1)\nblock pick-up(block1, * while clear(block2)", *l->task);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.location().line, 2);
    EXPECT_GT(e.location().column, 1);
  }
  EXPECT_THROW(parse_constraint_script("forall b in purple { never holding(b) }", *l->task), Error);
  EXPECT_THROW(parse_constraint_script("always exists b in {} { holding(b) }", *l->task), Error);
  EXPECT_THROW(parse_constraint_script("sometimes holding(block1)", *l->task), ParseError);
}

TEST(Script, WriteRoundTrip) {
  const auto l = six_blocks();
  const auto set = parse_constraint_script(read_fixture("bw/bw3_both.cstl"), *l->task);
  EXPECT_TRUE(equivalent(parse_constraint_script(write_constraint_script(set), *l->task), set));
}

TEST(Resolve, SingletonAttribute) {
  const auto l = load_text(kBw,
                           "(define (problem p) (:domain blocksworld) (:objects b1 b2 b3 - block t1 - table)"
                           " (:init (arm-empty)) (:goal (arm-empty)))",
                           R"({"attributes": {"red": ["b3"], "blue": []}})");
  using logic::ObjectSet;
  using logic::Term;
  ConstraintSet set;
  set.add(Global{Expr::forall("o", ObjectSet{ObjectSet::Kind::Attribute, "red", {}, {}},
                              Expr::negate(Expr::atom("holding", {Term::var("o")}))),
                 "test"});
  const auto r = resolve_attributes(set, *l->task);
  ASSERT_EQ(r.globals.size(), 1u);
  EXPECT_EQ(r.globals[0].expr, Expr::negate(Expr::atom(GroundedAtom{"holding", {"b3"}})));
  EXPECT_TRUE(equivalent(resolve_attributes(r, *l->task), r));

  const auto vacuous = parse_constraint_script("always forall b in blue { holding(b) }", *l->task);
  EXPECT_TRUE(vacuous.empty());
  EXPECT_FALSE(vacuous.warnings.empty());
  EXPECT_THROW(parse_constraint_script("always forall b in green { holding(b) }", *l->task), Error);
}

TEST(Resolve, OrangeBlocksAreNotMoved) {
  const auto l = six_blocks();
  const auto set = parse_constraint_script("forall b in orange { never holding(b) }", *l->task);
  std::set<std::string> keys = canonical_keys(set);
  EXPECT_EQ(keys, (std::set<std::string>{"global not(holding(block1))", "global not(holding(block2))"}));
}

TEST(Resolve, IdempotentOnAllPairs) {
  const auto bw = six_blocks();
  const auto hc = house_rules_house();
  for (const auto& [dir, task] : {std::pair{"pairs/bw", bw->task.get()}, std::pair{"pairs/hc", hc->task.get()}}) {
    for (const auto& e : std::filesystem::directory_iterator(castl::testing::fixture_path(dir))) {
      if (e.path().extension() != ".cstl") continue;
      const auto set = parse_constraint_script(pddl::read_file(e.path().string()), *task);
      EXPECT_EQ(canonical_keys(resolve_attributes(set, *task)), canonical_keys(set)) << e.path();
    }
  }
}

TEST(Render, SentencesUseDomainPhrases) {
  const auto l = six_blocks();
  const auto set = parse_constraint_json(read_fixture("bw/flat_json.json"), *l->task);
  const auto lines = render_constraints_nl(set, bench::phrases(bench::Domain::BW));
  ASSERT_EQ(lines.size(), 2u);
  EXPECT_NE(lines[0].find("block0 is on table1"), std::string::npos) << lines[0];
  EXPECT_NE(lines[1].find("pick up block0 from table0"), std::string::npos) << lines[1];
  EXPECT_NE(lines[1].find("block4 is on block5"), std::string::npos) << lines[1];
}

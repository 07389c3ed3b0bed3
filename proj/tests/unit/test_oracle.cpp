#include <gtest/gtest.h>

#include "castl/bench/generator.hpp"
#include "castl/constraints/json_format.hpp"
#include "castl/constraints/script.hpp"
#include "castl/oracle/oracle.hpp"
#include "castl/planner/plan.hpp"
#include "support.hpp"

using namespace castl;
using castl::testing::load_fixture;
using castl::testing::load_text;
using castl::testing::read_fixture;
using castl::testing::reference_bfs;
using castl::testing::reference_check;
using oracle::ViolationKind;

namespace {

std::unique_ptr<castl::testing::Loaded> two_block() { return load_fixture("domains/bw.pddl", "bw/two_block.pddl"); }

std::vector<pddl::ActionId> plan_fixture(const std::string& rel, const pddl::GroundedTask& task) {
  return planner::resolve_plan(planner::read_plan(read_fixture(rel)), task);
}

}  // namespace

TEST(Validate, ValidPlan) {
  const auto l = two_block();
  EXPECT_FALSE(oracle::validate(plan_fixture("plans/valid.txt", *l->task), *l->task, {}).has_value());
}

TEST(Validate, EmptyPlanWhenGoalHolds) {
  const auto l = load_text(read_fixture("domains/bw.pddl"),
                           "(define (problem p) (:domain blocksworld) (:objects b1 - block t1 - table)"
                           " (:init (arm-empty) (on_table b1 t1) (clear b1)) (:goal (clear b1)))");
  EXPECT_FALSE(oracle::validate({}, *l->task, {}).has_value());
}

TEST(Validate, EachKindIsReported) {
  const auto l = two_block();
  const auto& task = *l->task;
  const auto never = constraints::parse_constraint_script(read_fixture("plans/never_hold_b1.cstl"), task);
  const auto gate = constraints::parse_constraint_script(read_fixture("plans/gate_b1.cstl"), task);

  auto v = oracle::validate(plan_fixture("plans/precondition.json", task), task, {});
  ASSERT_TRUE(v);
  EXPECT_EQ(v->kind, ViolationKind::Precondition);
  EXPECT_EQ(v->step, 0u);

  v = oracle::validate(plan_fixture("plans/goal.txt", task), task, {});
  ASSERT_TRUE(v);
  EXPECT_EQ(v->kind, ViolationKind::Goal);
  EXPECT_EQ(v->step, 1u);

  v = oracle::validate(plan_fixture("plans/global.txt", task), task, never);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->kind, ViolationKind::Global);
  EXPECT_EQ(v->step, 1u);
  EXPECT_NE(v->detail.find("holding(b1)"), std::string::npos) << v->detail;

  v = oracle::validate(plan_fixture("plans/implication.txt", task), task, gate);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->kind, ViolationKind::Implication);
  EXPECT_EQ(v->step, 0u);

  // the reference checker agrees
  EXPECT_EQ(reference_check(task, never, plan_fixture("plans/global.txt", task)), "global@1");
  EXPECT_EQ(reference_check(task, gate, plan_fixture("plans/implication.txt", task)), "implication@0");
}

TEST(Validate, GlobalCheckedInInitialState) {
  const auto l = two_block();
  const auto cs = constraints::parse_constraint_script("always holding(b2)", *l->task);
  const auto v = oracle::validate(plan_fixture("plans/valid.txt", *l->task), *l->task, cs);
  ASSERT_TRUE(v);
  EXPECT_EQ(v->kind, ViolationKind::Global);
  EXPECT_EQ(v->step, 0u);
}

TEST(Bfs, SmallCases) {
  const auto l = two_block();
  auto r = oracle::bfs_optimal(*l->task, {}, 10);
  ASSERT_EQ(r.status, oracle::SearchStatus::Found);
  EXPECT_EQ(r.length, 2);
  EXPECT_FALSE(oracle::validate(r.plan, *l->task, {}).has_value());

  const auto never = constraints::parse_constraint_script("never holding(b1)", *l->task);
  EXPECT_EQ(oracle::bfs_optimal(*l->task, never, 10).status, oracle::SearchStatus::NoPlan);
  EXPECT_EQ(oracle::bfs_optimal(*l->task, {}, 0).status, oracle::SearchStatus::NoPlan);
  EXPECT_EQ(oracle::bfs_optimal(*l->task, {}, 1).status, oracle::SearchStatus::NoPlan);
}

TEST(Bfs, OverflowIsExplicit) {
  const auto l = load_fixture("domains/bw.pddl", "bw/six_blocks.pddl");
  const auto r = oracle::bfs_optimal(*l->task, {}, 30, 50);
  EXPECT_EQ(r.status, oracle::SearchStatus::Overflow);
  EXPECT_EQ(r.length, -1);
}

TEST(Bfs, AgreesWithReferenceSearch) {
  for (auto d : {bench::Domain::BW, bench::Domain::HC, bench::Domain::KT}) {
    for (auto prof : bench::all_profiles()) {
      const auto inst = bench::generate(d, 1, prof, 17);
      const auto l = load_text(inst.domain_pddl, inst.problem_pddl, inst.scene_json);
      const auto cs = constraints::parse_constraint_script(inst.constraints_cstl, *l->task);
      const auto ref = reference_bfs(*l->task, cs, 30);
      if (ref.overflow) continue;
      const auto r = oracle::bfs_optimal(*l->task, cs, 30);
      ASSERT_EQ(r.status, oracle::SearchStatus::Found) << inst.name;
      EXPECT_EQ(r.length, *ref.length) << inst.name;
      EXPECT_FALSE(oracle::validate(r.plan, *l->task, cs).has_value()) << inst.name;
      EXPECT_EQ(reference_check(*l->task, cs, r.plan), "") << inst.name;
    }
  }
}

TEST(Simulate, Deterministic) {
  const auto l = load_fixture("domains/bw.pddl", "bw/sussman.pddl");
  const auto r = oracle::bfs_optimal(*l->task, {}, 10);
  const auto a = planner::make_plan(*l->task, r.plan);
  const auto b = planner::make_plan(*l->task, r.plan);
  EXPECT_EQ(a.states, b.states);
  EXPECT_EQ(a.states.size(), a.steps.size() + 1);
  EXPECT_EQ(a.states.front(), l->task->initial_state());
}

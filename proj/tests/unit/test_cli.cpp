#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "castl/constraints/json_format.hpp"
#include "castl/constraints/script.hpp"
#include "support.hpp"

using namespace castl;
using castl::testing::fixture_path;
using castl::testing::read_fixture;

#ifndef CASTL_BIN
#define CASTL_BIN "castl"
#endif

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Run castl_run(const std::string& args, const std::string& env = "") {
  const fs::path dir = fs::temp_directory_path();
  const fs::path out = dir / "castl_cli_out.txt";
  const fs::path err = dir / "castl_cli_err.txt";
  const std::string cmd = env + " " + std::string(CASTL_BIN) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string fx(const std::string& rel) { return "'" + fixture_path(rel) + "'"; }

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / name;
  fs::remove_all(d);
  return d;
}

}  // namespace

TEST(Cli, SolveTwoBlocks) {
  const auto r = castl_run("solve " + fx("domains/bw.pddl") + " " + fx("bw/two_block.pddl"));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["makespan"], 2);
  EXPECT_EQ(j["steps"].size(), 2u);
  const auto text = castl_run("solve --text " + fx("domains/bw.pddl") + " " + fx("bw/two_block.pddl"));
  EXPECT_EQ(text.code, 0);
  EXPECT_NE(text.out.find("stack"), std::string::npos);
}

TEST(Cli, SolveInfeasibleAndErrors) {
  const auto r = castl_run("solve " + fx("domains/bw.pddl") + " " + fx("bw/two_block.pddl") + " --constraints " +
                           fx("plans/contradictory.cstl") + " --max-horizon 6");
  EXPECT_EQ(r.code, 2) << r.err;
  EXPECT_NE(r.err.find("infeasible"), std::string::npos) << r.err;

  const auto bad = castl_run("solve " + fx("domains/bw.pddl") + " " + fx("plans/malformed.txt"));
  EXPECT_EQ(bad.code, 1);
  EXPECT_NE(bad.err.find("malformed.txt"), std::string::npos) << bad.err;
  EXPECT_EQ(castl_run("solve").code, 1);
  EXPECT_EQ(castl_run("frobnicate").code, 1);
}

TEST(Cli, SolveWithGridMotion) {
  const auto r = castl_run("solve " + fx("grid/domain.pddl") + " " + fx("grid/problem.pddl") + " --scene " +
                           fx("grid/scene.json") + " --motion grid");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.err.find("blocked move(robot1, room1, room2) while locked(room2)"), std::string::npos) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["steps"].size(), 3u);
  EXPECT_EQ(j["steps"][2]["trace"].size(), 12u);
}

TEST(Cli, Validate) {
  const std::string task = " " + fx("domains/bw.pddl") + " " + fx("bw/two_block.pddl");
  EXPECT_EQ(castl_run("validate " + fx("plans/valid.txt") + task).code, 0);
  const auto g = castl_run("validate " + fx("plans/global.txt") + task + " --constraints " + fx("plans/never_hold_b1.json"));
  EXPECT_EQ(g.code, 4) << g.err;
  const auto j = nlohmann::json::parse(g.out);
  EXPECT_EQ(j["violation"]["kind"], "global");
  EXPECT_EQ(j["violation"]["step"], 1);
  EXPECT_EQ(castl_run("validate " + fx("plans/malformed.txt") + task).code, 1);
}

TEST(Cli, DefaultTimeoutIsSixty) {
  const auto r = castl_run("solve --help");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("--timeout"), std::string::npos);
  EXPECT_NE(r.out.find("60"), std::string::npos) << r.out;
}

TEST(Cli, TranslateReplay) {
  const auto out_dsl = fresh_dir("castl_cli_dsl");
  const auto out_json = fresh_dir("castl_cli_json");
  const std::string common = fx("llm/house_rules/nl.txt") + " " + fx("domains/hc.pddl") + " " + fx("hc/house_rules_scene.json");
  const auto a = castl_run("translate " + common + " --replay-dir " + fx("llm/house_rules/replay") + " --out-dir '" +
                           out_dsl.string() + "'");
  ASSERT_EQ(a.code, 0) << a.err;
  const auto b = castl_run("translate " + common + " --target json --replay-dir " + fx("llm/house_rules_json/replay") +
                           " --out-dir '" + out_json.string() + "'");
  ASSERT_EQ(b.code, 0) << b.err;
  EXPECT_EQ(slurp(out_dsl / "problem.pddl"), read_fixture("llm/house_rules/expected_problem.pddl"));

  const auto l = castl::testing::load_fixture("domains/hc.pddl", "hc/house_rules_problem.pddl", "hc/house_rules_scene.json");
  const auto from_dsl = constraints::parse_constraint_script(slurp(out_dsl / "constraints.cstl"), *l->task);
  const auto from_json = constraints::parse_constraint_json(slurp(out_json / "constraints.json"), *l->task);
  EXPECT_TRUE(constraints::equivalent(from_dsl, from_json));
  EXPECT_EQ(from_dsl.implications.size(), 4u);

  // replayed traces are byte-identical
  const auto again = fresh_dir("castl_cli_dsl2");
  ASSERT_EQ(castl_run("translate " + common + " --replay-dir " + fx("llm/house_rules/replay") + " --out-dir '" +
                      again.string() + "'")
                .code,
            0);
  EXPECT_EQ(slurp(out_dsl / "trace.json"), slurp(again / "trace.json"));
}

TEST(Cli, TranslateWithoutKey) {
  const std::string common = fx("llm/house_rules/nl.txt") + " " + fx("domains/hc.pddl") + " " + fx("hc/house_rules_scene.json");
  const auto r = castl_run("translate " + common + " --api-key-env CASTL_CLI_NO_KEY", "env -u CASTL_CLI_NO_KEY");
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("CASTL_CLI_NO_KEY"), std::string::npos) << r.err;
}

TEST(Cli, GenerateAndBench) {
  const auto dir = fresh_dir("castl_cli_gen");
  const auto g = castl_run("generate kt 1 implglob 3 --out-dir '" + dir.string() + "'");
  ASSERT_EQ(g.code, 0) << g.err;
  const auto solved = castl_run("solve '" + (dir / "domain.pddl").string() + "' '" + (dir / "problem.pddl").string() +
                                "' --scene '" + (dir / "scene.json").string() + "' --constraints '" +
                                (dir / "constraints.cstl").string() + "'");
  ASSERT_EQ(solved.code, 0) << solved.err;
  const auto truth = nlohmann::json::parse(slurp(dir / "ground_truth.json"));
  EXPECT_EQ(nlohmann::json::parse(solved.out)["makespan"], truth["optimal_makespan"]);

  const std::string args = "bench --domains bw,hc --tiers 1 --profiles no,impl --trials 2 --seed 4";
  const auto a = castl_run(args);
  const auto b = castl_run(args);
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(nlohmann::json::parse(a.out)["totals"]["trials"], 8);
  EXPECT_EQ(castl_run("bench --tiers 3").code, 1);
}

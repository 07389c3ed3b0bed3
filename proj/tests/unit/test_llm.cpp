#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <thread>

#include "castl/constraints/builder.hpp"
#include "castl/constraints/script.hpp"
#include "castl/llm/pipeline.hpp"
#include "castl/llm/provider.hpp"
#include "castl/pddl/parser.hpp"
// must match the provider build, or the two httplib definitions differ
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"
#include "support.hpp"

using namespace castl;
using castl::testing::fixture_path;
using castl::testing::load_fixture;
using castl::testing::read_fixture;
using llm::ChatRequest;
using Responses = std::map<std::string, std::deque<std::string>>;

#ifndef CASTL_ASSETS_DIR
#define CASTL_ASSETS_DIR "assets"
#endif

namespace {

Responses case_responses(const std::string& name) {
  Responses out;
  const auto j = nlohmann::json::parse(read_fixture("llm/" + name + "/responses.json"));
  for (const auto& [stage, answers] : j.items()) {
    for (const auto& a : answers) out[stage].push_back(a.get<std::string>());
  }
  return out;
}

struct Case {
  std::string nl;
  std::string domain_pddl;
  nlohmann::json scene;
  llm::PromptAssets assets;
};

Case load_case(const std::string& name) {
  const auto j = nlohmann::json::parse(read_fixture("llm/" + name + "/case.json"));
  const std::string base = "llm/" + name + "/";
  Case c;
  c.nl = read_fixture(base + j["nl"].get<std::string>());
  c.domain_pddl = read_fixture(base + j["domain"].get<std::string>());
  c.scene = nlohmann::json::parse(read_fixture(base + j["scene"].get<std::string>()));
  const auto domain = pddl::parse_domain(c.domain_pddl);
  c.assets = llm::PromptAssets::load(CASTL_ASSETS_DIR, domain.name);
  return c;
}

llm::Translation run_scripted(const std::string& name, Responses responses, llm::PipelineOptions opts = {}) {
  const Case c = load_case(name);
  llm::ScriptedProvider provider(std::move(responses));
  return llm::translate(provider, c.nl, c.domain_pddl, c.scene, c.assets, opts);
}

llm::Translation replay(const std::string& name, llm::PipelineOptions opts = {}) {
  const Case c = load_case(name);
  llm::ReplayProvider provider(fixture_path("llm/" + name + "/replay"));
  return llm::translate(provider, c.nl, c.domain_pddl, c.scene, c.assets, opts);
}

std::unique_ptr<castl::testing::Loaded> house_rules_house() {
  return load_fixture("domains/hc.pddl", "hc/house_rules_problem.pddl", "hc/house_rules_scene.json");
}

constraints::ConstraintSet house_rules_by_builder(const pddl::GroundedTask& task) {
  constraints::ConstraintBuilder pd(task);
  std::vector<logic::Expr> visited;
  for (const std::string room : {"kitchen", "bedroom1", "bedroom2", "restroom"}) {
    visited.push_back(pd.make_grounded_predicate("visited", {"robot1", room}));
  }
  constraints::ConstraintSet set;
  set.add(pd.block_expression_action(pd.make_action_assignment("move", {"robot1", "living-room", "backyard"}),
                                     pd.make_not(pd.make_and(visited))));
  return constraints::resolve_attributes(set, task);
}

}  // namespace

TEST(Provider, RequestHashNormalisesWhitespace) {
  ChatRequest a{"detect", {{"user", "Is there an order?\nYes or no."}}};
  ChatRequest b{"detect", {{"user", "Is there an order?   \r\nYes or no.  "}}};
  ChatRequest c{"extract", {{"user", "Is there an order?\nYes or no."}}};
  EXPECT_EQ(llm::request_hash(a), llm::request_hash(b));
  EXPECT_NE(llm::request_hash(a), llm::request_hash(c));
  EXPECT_EQ(llm::request_hash(a).rfind("detect-", 0), 0u);
  EXPECT_EQ(llm::request_hash(a).size(), std::string("detect-").size() + 16);
  EXPECT_EQ(llm::estimate_tokens("abcdefgh"), 2);
  EXPECT_EQ(llm::estimate_tokens("abcdefghi"), 3);
}

TEST(Provider, MissingReplayFixture) {
  const auto dir = std::filesystem::temp_directory_path() / "castl_empty_replay";
  std::filesystem::create_directories(dir);
  llm::ReplayProvider p(dir.string());
  try {
    p.complete({"detect", {{"user", "hello"}}});
    FAIL() << "expected ProviderError";
  } catch (const llm::ProviderError& e) {
    EXPECT_NE(std::string(e.what()).find("detect-"), std::string::npos) << e.what();
  }
}

TEST(Provider, RecordThenReplay) {
  const auto dir = std::filesystem::temp_directory_path() / "castl_record";
  std::filesystem::remove_all(dir);
  auto inner = std::make_unique<llm::ScriptedProvider>(Responses{{"detect", {"No."}}});
  llm::RecordingProvider rec(std::move(inner), dir.string());
  const ChatRequest req{"detect", {{"system", "s"}, {"user", "u"}}};
  EXPECT_EQ(rec.complete(req).text, "No.");
  llm::ReplayProvider rep(dir.string());
  EXPECT_EQ(rep.complete(req).text, "No.");
  EXPECT_TRUE(rep.complete(req).tokens_estimated);
  std::filesystem::remove_all(dir);
}

TEST(Provider, MissingApiKeyNamesVariable) {
  llm::ProviderConfig cfg;
  cfg.api_key_env = "CASTL_TEST_UNSET_KEY";
  ::unsetenv("CASTL_TEST_UNSET_KEY");
  try {
    llm::HttpProvider p(cfg);
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("CASTL_TEST_UNSET_KEY"), std::string::npos) << e.what();
  }
}

TEST(Provider, HttpRetriesServerErrors) {
  httplib::Server server;
  int hits = 0;
  std::string seen_auth;
  server.Post("/v1/chat/completions", [&](const httplib::Request& req, httplib::Response& res) {
    ++hits;
    seen_auth = req.get_header_value("Authorization");
    if (hits == 1) {
      res.status = 503;
      return;
    }
    const auto body = nlohmann::json::parse(req.body);
    nlohmann::json out = {{"choices", {{{"message", {{"role", "assistant"}, {"content", "Yes."}}}}}},
                          {"usage", {{"prompt_tokens", 17}, {"completion_tokens", 2}}},
                          {"model", body["model"]}};
    res.set_content(out.dump(), "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  ::setenv("CASTL_TEST_KEY", "sk-test", 1);
  llm::ProviderConfig cfg;
  cfg.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions";
  cfg.api_key_env = "CASTL_TEST_KEY";
  cfg.max_retries = 2;
  llm::HttpProvider p(cfg);
  const auto r = p.complete({"detect", {{"user", "Is there an order?"}}});
  server.stop();
  t.join();
  EXPECT_EQ(r.text, "Yes.");
  EXPECT_EQ(hits, 2);
  EXPECT_EQ(r.input_tokens, 17);
  EXPECT_EQ(r.output_tokens, 2);
  EXPECT_FALSE(r.tokens_estimated);
  EXPECT_EQ(seen_auth, "Bearer sk-test");
}

TEST(Helpers, FillTemplateAndFences) {
  EXPECT_EQ(llm::fill_template("a {{x}} b {{y}} {{x}}", {{"x", "1"}}), "a 1 b {{y}} 1");
  EXPECT_EQ(llm::strip_code_fence("```pddl\n(define)\n```\n"), "(define)\n");
  EXPECT_EQ(llm::strip_code_fence("Here:\n```\nalways true\n```\nThanks"), "always true\n");
  EXPECT_EQ(llm::strip_code_fence("  never false  "), "never false\n");
  EXPECT_THROW(llm::PromptAssets::load("/nonexistent", "housechip"), ConfigError);
  EXPECT_THROW(llm::parse_target("yaml"), ConfigError);
}

TEST(Pipeline, DetectNoSkipsConstraintStage) {
  auto r = case_responses("house_rules");
  r["detect"] = {"No, only rooms to visit."};
  const auto t = run_scripted("house_rules", r);
  ASSERT_EQ(t.trace.calls.size(), 3u);
  EXPECT_EQ(t.trace.calls[2].stage, "problem");
  EXPECT_TRUE(t.constraints.empty());
  EXPECT_FALSE(t.extraction.has_extra);
}

TEST(Pipeline, ProblemReprompt) {
  auto r = case_responses("house_rules");
  const std::string good = r["problem"].front();
  r["problem"] = {"(define (problem", good};
  const auto t = run_scripted("house_rules", r);
  EXPECT_EQ(t.trace.corrections.at("problem"), 1);

  r["problem"] = {"(define (problem", "(define (problem"};
  try {
    run_scripted("house_rules", r);
    FAIL() << "expected PipelineError";
  } catch (const llm::PipelineError& e) {
    EXPECT_NE(std::string(e.what()).find("stage problem"), std::string::npos) << e.what();
    EXPECT_EQ(e.trace().calls.back().stage, "problem");
  }
}

TEST(Pipeline, EmptyEventualsRejected) {
  auto r = case_responses("house_rules");
  r["extract"] = {"Eventual:\n- none\nImplication:\n- x\nGlobal:\n- none"};
  EXPECT_THROW(run_scripted("house_rules", r), llm::PipelineError);
}

TEST(Pipeline, UnknownObjectNamed) {
  auto r = case_responses("house_rules");
  r["problem"] = {
      "(define (problem p) (:domain housechip) (:objects robot1 - robot garage - room)"
      " (:init (at robot1 garage)) (:goal (visited robot1 garage)))"};
  try {
    run_scripted("house_rules", r);
    FAIL() << "expected PipelineError";
  } catch (const llm::PipelineError& e) {
    EXPECT_NE(std::string(e.what()).find("garage"), std::string::npos) << e.what();
  }
}

TEST(Pipeline, CorrectionBudget) {
  auto r = case_responses("house_rules");
  const std::string good = r["constraints"].front();
  r["constraints"] = {"block move(", "block move(", "block move(", good};
  const auto t = run_scripted("house_rules", r);
  EXPECT_EQ(t.trace.correction_attempts, 3);

  r["constraints"] = {"block move(", "block move(", "block move(", "block move(", good};
  try {
    run_scripted("house_rules", r);
    FAIL() << "expected PipelineError";
  } catch (const llm::PipelineError& e) {
    EXPECT_EQ(e.trace().correction_attempts, 3);
    EXPECT_NE(std::string(e.what()).find("stage constraints"), std::string::npos);
  }
}

TEST(Pipeline, SemanticCheckRegeneratesOnce) {
  auto r = case_responses("house_rules");
  const std::string good = r["constraints"].front();
  r["constraints"] = {"never visited(robot1, backyard)", good};
  r["semantic-check"] = {"No. The backyard must still be visited.", "Yes."};
  const auto t = run_scripted("house_rules", r);
  EXPECT_EQ(t.trace.semantic_regenerations, 1);
  EXPECT_TRUE(constraints::equivalent(t.constraints, house_rules_by_builder(*house_rules_house()->task)));

  r["constraints"] = {"never visited(robot1, backyard)", "never visited(robot1, kitchen)"};
  r["semantic-check"] = {"No.", "No."};
  try {
    run_scripted("house_rules", r);
    FAIL() << "expected PipelineError";
  } catch (const llm::PipelineError& e) {
    ASSERT_EQ(e.renderings().size(), 2u);
    EXPECT_NE(e.renderings()[0], e.renderings()[1]);
  }
}

TEST(Pipeline, ProviderFailureCarriesTrace) {
  auto r = case_responses("house_rules");
  r.erase("paraphrase");
  try {
    run_scripted("house_rules", r);
    FAIL() << "expected PipelineError";
  } catch (const llm::PipelineError& e) {
    EXPECT_EQ(e.trace().calls.size(), 4u);
  }
}

TEST(Replay, WorkedExample) {
  const auto t = replay("worked_example");
  EXPECT_EQ(t.problem_pddl, read_fixture("llm/worked_example/expected_problem.pddl"));
  const auto l = load_fixture("domains/hc.pddl", "llm/worked_example/expected_problem.pddl", "hc/beds_scene.json");
  constraints::ConstraintBuilder pd(*l->task);
  constraints::ConstraintSet expected;
  const auto not_r5 = pd.make_not(pd.make_grounded_predicate("visited", {"robot1", "room05"}));
  for (const auto& [from, to] : std::vector<std::pair<std::string, std::string>>{
           {"room01", "room02"}, {"room01", "room06"}, {"room02", "room06"}, {"room06", "room02"}}) {
    expected.add(pd.block_expression_action(pd.make_action_assignment("move", {"robot1", from, to}), not_r5));
  }
  EXPECT_EQ(t.constraints.implications.size(), 4u);
  EXPECT_TRUE(constraints::equivalent(t.constraints, constraints::resolve_attributes(expected, *l->task)));
}

TEST(Replay, HouseRulesMatchesBuilder) {
  const auto t = replay("house_rules");
  EXPECT_EQ(t.problem_pddl, read_fixture("llm/house_rules/expected_problem.pddl"));
  EXPECT_TRUE(constraints::equivalent(t.constraints, house_rules_by_builder(*house_rules_house()->task)));
  EXPECT_EQ(t.trace.correction_attempts, 0);
}

TEST(Replay, DslAndJsonAgree) {
  llm::PipelineOptions json_opts;
  json_opts.target = llm::Target::Json;
  EXPECT_TRUE(constraints::equivalent(replay("house_rules").constraints, replay("house_rules_json", json_opts).constraints));
}

TEST(Replay, BrokenThenFixed) {
  const auto t = replay("broken_then_fixed");
  EXPECT_EQ(t.trace.correction_attempts, 1);
  EXPECT_EQ(t.trace.calls.size(), 8u);
  EXPECT_TRUE(constraints::equivalent(t.constraints, house_rules_by_builder(*house_rules_house()->task)));
}

TEST(Replay, TraceIsReproducible) {
  const auto a = replay("worked_example").trace.to_json().dump();
  const auto b = replay("worked_example").trace.to_json().dump();
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.find("seconds"), std::string::npos);
  EXPECT_TRUE(replay("worked_example").trace.to_json(true).contains("seconds"));
}

TEST(Constraints, NoMoveLoopExpandsOverSixBlocks) {
  const auto l = load_fixture("domains/bw.pddl", "bw/six_blocks.pddl", "bw/six_blocks_scene.json");
  const auto cs = constraints::parse_constraint_script(read_fixture("bw/bw3_no_move.cstl"), *l->task);
  // per block: pick-up from two tables, unstack from the five other blocks
  EXPECT_EQ(cs.implications.size(), 21u);
  EXPECT_TRUE(cs.globals.empty());
}

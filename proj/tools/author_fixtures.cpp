// author_fixtures: records replay fixtures for one pipeline case from scripted answers.
//
// A case directory holds
//   case.json        {"nl": "nl.txt", "domain": "...pddl", "scene": "...json", "target": "dsl"}
//   responses.json   {"<stage>": ["answer", ...], ...}
// and receives replay/<hash>.txt, one file per request. Paths in case.json are relative
// to the case directory. Re-run after editing prompt templates: the hashes change.

#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "castl/llm/pipeline.hpp"
#include "castl/pddl/parser.hpp"

#ifndef CASTL_DEFAULT_ASSETS
#define CASTL_DEFAULT_ASSETS "assets"
#endif

namespace fs = std::filesystem;
using nlohmann::json;
using namespace castl;

int main(int argc, char** argv) {
  CLI::App app{"Record replay fixtures for a translation case"};
  std::vector<std::string> cases;
  std::string assets_dir = CASTL_DEFAULT_ASSETS;
  app.add_option("cases", cases, "Case directories")->required()->check(CLI::ExistingDirectory);
  app.add_option("--assets", assets_dir, "Prompt and example directory")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  int failures = 0;
  for (const auto& dir : cases) {
    try {
      const fs::path root(dir);
      const json spec = json::parse(pddl::read_file((root / "case.json").string()));
      const json responses = json::parse(pddl::read_file((root / "responses.json").string()));

      auto scripted = std::make_unique<llm::ScriptedProvider>();
      for (const auto& [stage, answers] : responses.items()) {
        for (const auto& a : answers) scripted->push(stage, a.get<std::string>());
      }
      const fs::path replay = root / "replay";
      fs::remove_all(replay);
      llm::RecordingProvider recorder(std::move(scripted), replay.string());

      const std::string domain_text = pddl::read_file((root / spec.at("domain").get<std::string>()).string());
      const auto domain = pddl::parse_domain(domain_text);
      const json scene = json::parse(pddl::read_file((root / spec.at("scene").get<std::string>()).string()));
      const std::string nl = pddl::read_file((root / spec.value("nl", std::string("nl.txt"))).string());

      llm::PipelineOptions opts;
      opts.target = llm::parse_target(spec.value("target", std::string("dsl")));
      const auto assets = llm::PromptAssets::load(assets_dir, domain.name);
      const auto result = llm::translate(recorder, nl, domain_text, scene, assets, opts);

      std::cout << dir << ": " << result.trace.calls.size() << " calls, " << result.trace.correction_attempts
                << " corrections, " << result.constraints.size() << " constraints\n";
      std::cout << result.problem_pddl << "\n";
      for (const auto& k : constraints::canonical_keys(result.constraints)) std::cout << "  " << k << "\n";
    } catch (const std::exception& e) {
      std::cerr << dir << ": " << e.what() << "\n";
      ++failures;
    }
  }
  return failures == 0 ? 0 : 1;
}

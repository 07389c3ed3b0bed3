// castl: command-line front end.
//
// Exit codes: 0 success / plan found, 1 usage, parse, validation or I/O error,
// 2 infeasible, 3 timeout, 4 plan violates the task.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "castl/bench/generator.hpp"
#include "castl/bench/runner.hpp"
#include "castl/constraints/json_format.hpp"
#include "castl/constraints/script.hpp"
#include "castl/error.hpp"
#include "castl/llm/pipeline.hpp"
#include "castl/oracle/oracle.hpp"
#include "castl/pddl/parser.hpp"
#include "castl/pddl/scene.hpp"
#include "castl/planner/planner.hpp"
#include "castl/tamp/tamp.hpp"
#include "castl/util/strings.hpp"

#ifndef CASTL_DEFAULT_ASSETS
#define CASTL_DEFAULT_ASSETS "assets"
#endif

namespace {

using namespace castl;
using nlohmann::json;

enum Exit { kOk = 0, kError = 1, kInfeasible = 2, kTimeout = 3, kViolation = 4 };

/// Prefixes parse errors with the file they came from.
class FileError : public Error {
 public:
  using Error::Error;
};

template <typename F>
auto in_file(const std::string& path, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ParseError& e) {
    throw FileError(path + ":" + e.what());
  } catch (const ValidationError& e) {
    throw FileError(path + ": " + e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
}

json read_json_file(const std::string& path) {
  const std::string text = pddl::read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FileError(path + ": " + e.what());
  }
}

struct LoadedTask {
  pddl::DomainModel domain;
  pddl::SceneDescription scene;
  std::unique_ptr<pddl::GroundedTask> task;
  constraints::ConstraintSet constraints;
};

void load_task(LoadedTask& t, const std::string& domain_path, const std::string& problem_path,
               const std::string& scene_path, const std::string& constraints_path) {
  const std::string dtext = pddl::read_file(domain_path);
  t.domain = in_file(domain_path, [&] { return pddl::parse_domain(dtext); });
  const std::string ptext = pddl::read_file(problem_path);
  t.scene = in_file(problem_path, [&] { return pddl::parse_problem(ptext, t.domain); });
  if (!scene_path.empty()) {
    const json sidecar = read_json_file(scene_path);
    in_file(scene_path, [&] {
      pddl::apply_scene_json(t.scene, sidecar, t.domain);
      return 0;
    });
  }
  t.task = std::make_unique<pddl::GroundedTask>(in_file(problem_path, [&] { return pddl::ground(t.domain, t.scene); }));
  if (!constraints_path.empty()) {
    const std::string ctext = pddl::read_file(constraints_path);
    const bool is_json = std::filesystem::path(constraints_path).extension() == ".json";
    t.constraints = in_file(constraints_path, [&] {
      return is_json ? constraints::parse_constraint_json(ctext, *t.task)
                     : constraints::parse_constraint_script(ctext, *t.task);
    });
    for (const auto& w : t.constraints.warnings) std::cerr << constraints_path << ": warning: " << w << "\n";
  }
}

int status_exit(planner::SolveStatus s) {
  switch (s) {
    case planner::SolveStatus::Plan: return kOk;
    case planner::SolveStatus::Infeasible: return kInfeasible;
    case planner::SolveStatus::Timeout: return kTimeout;
  }
  return kError;
}

template <typename T, typename F>
std::vector<T> parse_list(const std::string& csv, F&& parse) {
  std::vector<T> out;
  for (const auto& part : util::split(csv, ',')) {
    const std::string p = util::trim(part);
    if (!p.empty()) out.push_back(parse(p));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"castl: constrained task planning from PDDL and natural language"};
  app.set_config("--config", "", "INI/TOML file with option defaults (sections per subcommand)");
  app.require_subcommand(1);

  // solve
  auto* solve = app.add_subcommand("solve", "Find a makespan-optimal plan");
  std::string s_domain, s_problem, s_scene, s_constraints, s_motion, s_out;
  planner::EncodingConfig s_enc;
  int s_iterations = 200;
  bool s_text = false;
  solve->add_option("domain", s_domain, "PDDL domain")->required()->check(CLI::ExistingFile);
  solve->add_option("problem", s_problem, "PDDL problem")->required()->check(CLI::ExistingFile);
  solve->add_option("--scene", s_scene, "Scene sidecar JSON (attributes, geometry)")->check(CLI::ExistingFile);
  solve->add_option("--constraints", s_constraints, "Constraint script (.cstl) or JSON list (.json)")
      ->check(CLI::ExistingFile);
  solve->add_option("--motion", s_motion, "Motion backend: grid, stub, random-fail:PCT[,SEED], scripted:FILE");
  solve->add_option("--max-horizon", s_enc.max_horizon, "Largest plan length tried")->capture_default_str();
  solve->add_option("--timeout", s_enc.timeout, "Wall-clock limit in seconds")->capture_default_str();
  solve->add_option("--seed", s_enc.seed, "Solver and backend seed")->capture_default_str();
  solve->add_option("--max-iterations", s_iterations, "Candidate plans tried by the motion loop")->capture_default_str();
  solve->add_option("--out", s_out, "Write the plan here instead of stdout");
  solve->add_flag("--text", s_text, "Write the plan as one action per line");

  // validate
  auto* validate = app.add_subcommand("validate", "Check a plan against a task and constraints");
  std::string v_plan, v_domain, v_problem, v_scene, v_constraints;
  validate->add_option("plan", v_plan, "Plan file (JSON or text)")->required()->check(CLI::ExistingFile);
  validate->add_option("domain", v_domain, "PDDL domain")->required()->check(CLI::ExistingFile);
  validate->add_option("problem", v_problem, "PDDL problem")->required()->check(CLI::ExistingFile);
  validate->add_option("--scene", v_scene, "Scene sidecar JSON")->check(CLI::ExistingFile);
  validate->add_option("--constraints", v_constraints, "Constraint script or JSON list")->check(CLI::ExistingFile);

  // translate
  auto* translate = app.add_subcommand("translate", "Turn a natural-language request into a problem and constraints");
  std::string t_nl, t_domain, t_scene, t_target = "dsl", t_provider = "live", t_replay, t_assets = CASTL_DEFAULT_ASSETS,
                                       t_examples, t_out;
  llm::ProviderConfig t_cfg;
  bool t_one_step = false, t_no_check = false, t_timing = false;
  translate->add_option("nl", t_nl, "Request text file")->required()->check(CLI::ExistingFile);
  translate->add_option("domain", t_domain, "PDDL domain")->required()->check(CLI::ExistingFile);
  translate->add_option("scene", t_scene, "Scene JSON (objects, init, attributes)")->required()->check(CLI::ExistingFile);
  translate->add_option("--target", t_target, "Constraint format: dsl or json")->capture_default_str();
  translate->add_option("--provider", t_provider, "live, record or replay")->capture_default_str();
  translate->add_option("--replay-dir", t_replay, "Fixture directory for record/replay (implies replay if --provider is unset)");
  translate->add_option("--model", t_cfg.model, "Model name")->capture_default_str();
  translate->add_option("--endpoint", t_cfg.endpoint, "Chat-completion URL")->capture_default_str();
  translate->add_option("--api-key-env", t_cfg.api_key_env, "Environment variable holding the API key")->capture_default_str();
  translate->add_option("--temperature", t_cfg.temperature, "Sampling temperature")->capture_default_str();
  translate->add_option("--max-retries", t_cfg.max_retries, "HTTP retries per request")->capture_default_str();
  translate->add_option("--assets", t_assets, "Prompt and example directory")->capture_default_str();
  translate->add_option("--examples-from", t_examples, "Use another domain's in-context examples");
  translate->add_flag("--one-step", t_one_step, "Skip disambiguation and detection");
  translate->add_flag("--no-semantic-check", t_no_check, "Skip the semantic self-check");
  translate->add_flag("--timing", t_timing, "Include wall-clock times in trace.json");
  translate->add_option("--out-dir", t_out, "Write problem.pddl, constraints.{cstl,json} and trace.json here");

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "Generate instances, solve and validate them, and report");
  std::string b_domains = "hc,kt,bw", b_tiers = "1,2", b_profiles = "no,impl,glob,implglob,implglobattr", b_report;
  bench::BenchConfig b_cfg;
  bench_cmd->add_option("--domains", b_domains, "Comma-separated: hc, kt, bw")->capture_default_str();
  bench_cmd->add_option("--tiers", b_tiers, "Comma-separated: 1, 2")->capture_default_str();
  bench_cmd->add_option("--profiles", b_profiles, "Comma-separated constraint profiles")->capture_default_str();
  bench_cmd->add_option("--trials", b_cfg.trials, "Instances per (domain, tier, profile)")->capture_default_str();
  bench_cmd->add_option("--seed", b_cfg.seed, "Base seed")->capture_default_str();
  bench_cmd->add_option("--max-horizon", b_cfg.encoding.max_horizon, "Largest plan length tried")->capture_default_str();
  bench_cmd->add_option("--timeout", b_cfg.encoding.timeout, "Per-instance limit in seconds")->capture_default_str();
  bench_cmd->add_option("--motion", b_cfg.motion, "none, auto, or a backend for every domain")->capture_default_str();
  bench_cmd->add_option("--jobs", b_cfg.jobs, "Parallel workers")->capture_default_str();
  bench_cmd->add_option("--instances-dir", b_cfg.instances_dir, "Also write every generated instance here");
  bench_cmd->add_flag("--timing", b_cfg.timing, "Record solve times (reports then differ between runs)");
  bench_cmd->add_option("--report", b_report, "Write the JSON report here");

  // generate
  auto* gen = app.add_subcommand("generate", "Write one benchmark instance");
  std::string g_domain, g_profile, g_out;
  int g_tier = 1;
  std::uint64_t g_seed = 0;
  gen->add_option("domain", g_domain, "hc, kt or bw")->required();
  gen->add_option("tier", g_tier, "1 or 2")->required();
  gen->add_option("profile", g_profile, "no, impl, glob, implglob, implglobattr")->required();
  gen->add_option("seed", g_seed, "Seed")->required();
  gen->add_option("--out-dir", g_out, "Target directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kError;
  }

  try {
    if (*solve) {
      LoadedTask t;
      load_task(t, s_domain, s_problem, s_scene, s_constraints);
      std::optional<planner::Plan> plan;
      planner::SolveStatus status;
      if (s_motion.empty()) {
        auto r = planner::solve(*t.task, t.constraints, s_enc);
        status = r.status;
        plan = std::move(r.plan);
        std::cerr << "status: " << planner::to_string(status) << (r.proven ? " (proven)" : "")
                  << "  horizon: " << r.horizon << "  conflicts: " << r.stats.conflicts << "\n";
      } else {
        auto backend = tamp::make_backend(s_motion, *t.task, s_enc.seed);
        tamp::TampConfig tc;
        tc.encoding = s_enc;
        tc.max_iterations = s_iterations;
        auto r = tamp::tamp_solve(*t.task, t.constraints, *backend, tc);
        status = r.status;
        plan = std::move(r.plan);
        std::cerr << "status: " << planner::to_string(status) << (r.iteration_limit ? " (iteration limit)" : "")
                  << "  iterations: " << r.iterations << "  motion failures: " << r.failures.size() << "\n";
        for (const auto& f : r.failures) {
          std::cerr << "  blocked " << t.task->action(f.action).label() << " while " << logic::to_string(f.culprit)
                    << "\n";
        }
      }
      if (plan) {
        const std::string text = s_text ? planner::plan_to_text(*plan, *t.task) : planner::plan_to_json(*plan, *t.task);
        if (s_out.empty()) {
          std::cout << text;
        } else {
          write_text(s_out, text);
        }
      }
      return status_exit(status);
    }

    if (*validate) {
      LoadedTask t;
      load_task(t, v_domain, v_problem, v_scene, v_constraints);
      const std::string ptext = pddl::read_file(v_plan);
      const auto steps = in_file(v_plan, [&] { return planner::read_plan(ptext); });
      const auto ids = in_file(v_plan, [&] { return planner::resolve_plan(steps, *t.task); });
      json report = {{"plan", v_plan}, {"makespan", ids.size()}};
      const auto v = oracle::validate(ids, *t.task, t.constraints);
      if (v) {
        report["valid"] = false;
        report["violation"] = {{"step", v->step}, {"kind", oracle::to_string(v->kind)}, {"detail", v->detail}};
      } else {
        report["valid"] = true;
      }
      std::cout << report.dump(2) << "\n";
      return v ? kViolation : kOk;
    }

    if (*translate) {
      if (!t_replay.empty() && translate->count("--provider") == 0) t_provider = "replay";
      t_cfg.mode = llm::parse_provider_mode(t_provider);
      t_cfg.fixture_dir = t_replay;
      llm::PipelineOptions opts;
      opts.target = llm::parse_target(t_target);
      opts.multi_step = !t_one_step;
      opts.semantic_check = !t_no_check;
      const std::string domain_text = pddl::read_file(t_domain);
      const auto domain = in_file(t_domain, [&] { return pddl::parse_domain(domain_text); });
      const json scene = read_json_file(t_scene);
      const auto assets = llm::PromptAssets::load(t_assets, domain.name, t_examples);
      auto provider = llm::make_provider(t_cfg);
      try {
        const auto result = llm::translate(*provider, pddl::read_file(t_nl), domain_text, scene, assets, opts);
        const std::string cfile = opts.target == llm::Target::Dsl ? "constraints.cstl" : "constraints.json";
        if (t_out.empty()) {
          std::cout << result.problem_pddl << "\n" << result.constraints_text;
        } else {
          std::filesystem::create_directories(t_out);
          write_text((std::filesystem::path(t_out) / "problem.pddl").string(), result.problem_pddl);
          write_text((std::filesystem::path(t_out) / cfile).string(), result.constraints_text);
          write_text((std::filesystem::path(t_out) / "trace.json").string(), result.trace.to_json(t_timing).dump(2) + "\n");
        }
        std::cerr << "calls: " << result.trace.calls.size() << "  input tokens: " << result.trace.input_tokens()
                  << "  corrections: " << result.trace.correction_attempts
                  << "  constraints: " << result.constraints.size() << "\n";
      } catch (const llm::PipelineError& e) {
        if (!t_out.empty()) {
          std::filesystem::create_directories(t_out);
          write_text((std::filesystem::path(t_out) / "trace.json").string(), e.trace().to_json(t_timing).dump(2) + "\n");
        }
        for (const auto& r : e.renderings()) std::cerr << "rendering:\n" << r;
        throw;
      }
      return kOk;
    }

    if (*bench_cmd) {
      b_cfg.domains = parse_list<bench::Domain>(b_domains, [](const std::string& s) { return bench::parse_domain_name(s); });
      b_cfg.tiers = parse_list<int>(b_tiers, [](const std::string& s) {
        if (s != "1" && s != "2") throw ConfigError("tier must be 1 or 2, got '" + s + "'");
        return std::stoi(s);
      });
      b_cfg.profiles = parse_list<bench::Profile>(b_profiles, [](const std::string& s) { return bench::parse_profile(s); });
      const auto report = bench::run_bench(b_cfg, [](const bench::TrialResult& r) {
        std::cerr << r.instance << ": " << r.status << (r.valid ? "" : " (not valid)") << " makespan " << r.makespan
                  << " optimal " << r.optimal_makespan << (r.error.empty() ? "" : "  " + r.error) << "\n";
      });
      for (const auto& c : report.cells) {
        std::cerr << bench::to_string(c.domain) << " tier " << c.tier << " " << bench::to_string(c.profile) << ": "
                  << c.successes << "/" << c.trials << "\n";
      }
      const std::string text = bench::report_to_json(report).dump(2) + "\n";
      if (b_report.empty()) {
        std::cout << text;
      } else {
        write_text(b_report, text);
      }
      return kOk;
    }

    if (*gen) {
      const auto inst = bench::generate(bench::parse_domain_name(g_domain), g_tier, bench::parse_profile(g_profile), g_seed);
      bench::write_instance(inst, g_out);
      std::cerr << inst.name << ": optimal makespan " << inst.optimal_makespan << " after " << inst.attempts
                << " attempt(s)\n";
      return kOk;
    }
  } catch (const FileError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kError;
  }
  return kError;
}

#include "castl/bench/runner.hpp"

#include <chrono>
#include <filesystem>
#include <mutex>
#include <thread>

#include "castl/constraints/script.hpp"
#include "castl/error.hpp"
#include "castl/oracle/oracle.hpp"
#include "castl/pddl/parser.hpp"
#include "castl/pddl/scene.hpp"
#include "castl/tamp/tamp.hpp"

namespace castl::bench {

using nlohmann::json;

namespace {

std::string motion_for(const std::string& motion, Domain d) {
  if (motion != "auto") return motion;
  return d == Domain::HC ? "grid" : "stub";
}

json opt_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_opt(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

}  // namespace

std::uint64_t trial_seed(std::uint64_t base, int trial) { return base + static_cast<std::uint64_t>(trial); }

TrialResult run_trial(const Instance& inst, const BenchConfig& config) {
  TrialResult r;
  r.instance = inst.name;
  r.seed = inst.seed;
  r.optimal_makespan = inst.optimal_makespan;
  try {
    const auto domain = pddl::parse_domain(inst.domain_pddl);
    auto scene = pddl::parse_problem(inst.problem_pddl, domain);
    pddl::apply_scene_json(scene, json::parse(inst.scene_json), domain);
    const pddl::GroundedTask task(domain, scene);
    const auto constraints = constraints::parse_constraint_script(inst.constraints_cstl, task);

    const auto t0 = std::chrono::steady_clock::now();
    std::optional<planner::Plan> plan;
    planner::SolveStatus status;
    const std::string motion = motion_for(config.motion, inst.domain);
    if (motion == "none") {
      auto res = planner::solve(task, constraints, config.encoding);
      status = res.status;
      plan = std::move(res.plan);
      r.iterations = plan ? 1 : 0;
      r.conflicts = res.stats.conflicts;
    } else {
      auto backend = tamp::make_backend(motion, task, inst.seed);
      tamp::TampConfig tc;
      tc.encoding = config.encoding;
      auto res = tamp::tamp_solve(task, constraints, *backend, tc);
      status = res.status;
      plan = std::move(res.plan);
      r.iterations = res.iterations;
      r.motion_failures = static_cast<int>(res.failures.size());
      r.conflicts = res.stats.conflicts;
    }
    if (config.timing) {
      r.solve_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
    r.status = planner::to_string(status);
    if (plan) {
      r.makespan = static_cast<int>(plan->makespan());
      if (auto v = oracle::validate(plan->steps, task, constraints)) {
        r.violation = oracle::to_string(v->kind) + " at step " + std::to_string(v->step) + ": " + v->detail;
      } else {
        r.valid = true;
      }
    }
  } catch (const Error& e) {
    r.status = "error";
    r.error = e.what();
  }
  return r;
}

BenchReport run_bench(const BenchConfig& config, const ProgressFn& progress) {
  if (config.trials < 1) throw ConfigError("trials must be at least 1");
  if (config.jobs < 1) throw ConfigError("jobs must be at least 1");

  BenchReport report;
  report.config = config;
  struct Job {
    std::size_t cell;
    int trial;
  };
  std::vector<Job> jobs;
  for (Domain d : config.domains) {
    for (int tier : config.tiers) {
      for (Profile p : config.profiles) {
        CellSummary c;
        c.domain = d;
        c.tier = tier;
        c.profile = p;
        c.trials = config.trials;
        c.results.resize(static_cast<std::size_t>(config.trials));
        for (int t = 0; t < config.trials; ++t) jobs.push_back({report.cells.size(), t});
        report.cells.push_back(std::move(c));
      }
    }
  }

  std::mutex mu;
  std::size_t next = 0;
  auto worker = [&] {
    while (true) {
      Job job;
      {
        std::lock_guard<std::mutex> lock(mu);
        if (next >= jobs.size()) return;
        job = jobs[next++];
      }
      const auto& cell = report.cells[job.cell];
      const std::uint64_t seed = trial_seed(config.seed, job.trial);
      TrialResult r;
      try {
        const Instance inst = generate(cell.domain, cell.tier, cell.profile, seed);
        if (!config.instances_dir.empty()) write_instance(inst, std::filesystem::path(config.instances_dir) / inst.name);
        r = run_trial(inst, config);
      } catch (const Error& e) {
        r.instance = to_string(cell.domain) + "-t" + std::to_string(cell.tier) + "-" + to_string(cell.profile) +
                     "-s" + std::to_string(seed);
        r.seed = seed;
        r.status = "error";
        r.error = e.what();
      }
      std::lock_guard<std::mutex> lock(mu);
      report.cells[job.cell].results[static_cast<std::size_t>(job.trial)] = r;
      if (progress) progress(r);
    }
  };
  if (config.jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < config.jobs; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (auto& c : report.cells) {
    double makespan = 0;
    double opt = 0;
    int with_opt = 0;
    double iterations = 0;
    double seconds = 0;
    for (const auto& r : c.results) {
      iterations += r.iterations;
      if (r.optimal_makespan >= 0) {
        opt += r.optimal_makespan;
        ++with_opt;
      }
      if (r.solve_seconds) seconds += *r.solve_seconds;
      if (!r.valid) continue;
      ++c.successes;
      makespan += r.makespan;
      if (r.makespan == r.optimal_makespan) ++c.optimal;
    }
    c.success_rate = static_cast<double>(c.successes) / c.trials;
    c.mean_makespan = c.successes ? makespan / c.successes : 0;
    c.mean_optimal_makespan = with_opt ? opt / with_opt : 0;
    c.mean_iterations = iterations / c.trials;
    if (config.timing) c.mean_solve_seconds = seconds / c.trials;
    report.total_trials += c.trials;
    report.total_successes += c.successes;
  }
  return report;
}

json report_to_json(const BenchReport& report) {
  const auto& cfg = report.config;
  json domains = json::array();
  for (Domain d : cfg.domains) domains.push_back(to_string(d));
  json profiles = json::array();
  for (Profile p : cfg.profiles) profiles.push_back(to_string(p));
  json out;
  out["schema"] = "castl-bench-report/1";
  out["config"] = {{"domains", domains},
                   {"tiers", cfg.tiers},
                   {"profiles", profiles},
                   {"trials", cfg.trials},
                   {"seed", cfg.seed},
                   {"max_horizon", cfg.encoding.max_horizon},
                   {"timeout", cfg.encoding.timeout},
                   {"solver_seed", cfg.encoding.seed},
                   {"motion", cfg.motion},
                   {"timing", cfg.timing}};
  json cells = json::array();
  for (const auto& c : report.cells) {
    json trials = json::array();
    for (const auto& r : c.results) {
      trials.push_back({{"instance", r.instance},
                        {"seed", r.seed},
                        {"status", r.status},
                        {"valid", r.valid},
                        {"makespan", r.makespan},
                        {"optimal_makespan", r.optimal_makespan},
                        {"iterations", r.iterations},
                        {"motion_failures", r.motion_failures},
                        {"violation", r.violation},
                        {"error", r.error},
                        {"conflicts", r.conflicts},
                        {"solve_seconds", opt_number(r.solve_seconds)}});
    }
    cells.push_back({{"domain", to_string(c.domain)},
                     {"tier", c.tier},
                     {"profile", to_string(c.profile)},
                     {"trials", c.trials},
                     {"successes", c.successes},
                     {"optimal", c.optimal},
                     {"success_rate", c.success_rate},
                     {"mean_makespan", c.mean_makespan},
                     {"mean_optimal_makespan", c.mean_optimal_makespan},
                     {"mean_iterations", c.mean_iterations},
                     {"mean_solve_seconds", opt_number(c.mean_solve_seconds)},
                     {"results", trials}});
  }
  out["cells"] = cells;
  out["totals"] = {{"trials", report.total_trials}, {"successes", report.total_successes}};
  return out;
}

BenchReport report_from_json(const json& j) {
  BenchReport rep;
  try {
    if (j.at("schema").get<std::string>() != "castl-bench-report/1") throw ConfigError("unsupported report schema");
    const auto& cfg = j.at("config");
    rep.config.domains.clear();
    for (const auto& d : cfg.at("domains")) rep.config.domains.push_back(parse_domain_name(d.get<std::string>()));
    rep.config.tiers = cfg.at("tiers").get<std::vector<int>>();
    rep.config.profiles.clear();
    for (const auto& p : cfg.at("profiles")) rep.config.profiles.push_back(parse_profile(p.get<std::string>()));
    rep.config.trials = cfg.at("trials").get<int>();
    rep.config.seed = cfg.at("seed").get<std::uint64_t>();
    rep.config.encoding.max_horizon = cfg.at("max_horizon").get<int>();
    rep.config.encoding.timeout = cfg.at("timeout").get<double>();
    rep.config.encoding.seed = cfg.at("solver_seed").get<std::uint64_t>();
    rep.config.motion = cfg.at("motion").get<std::string>();
    rep.config.timing = cfg.at("timing").get<bool>();
    for (const auto& cj : j.at("cells")) {
      CellSummary c;
      c.domain = parse_domain_name(cj.at("domain").get<std::string>());
      c.tier = cj.at("tier").get<int>();
      c.profile = parse_profile(cj.at("profile").get<std::string>());
      c.trials = cj.at("trials").get<int>();
      c.successes = cj.at("successes").get<int>();
      c.optimal = cj.at("optimal").get<int>();
      c.success_rate = cj.at("success_rate").get<double>();
      c.mean_makespan = cj.at("mean_makespan").get<double>();
      c.mean_optimal_makespan = cj.at("mean_optimal_makespan").get<double>();
      c.mean_iterations = cj.at("mean_iterations").get<double>();
      c.mean_solve_seconds = read_opt(cj, "mean_solve_seconds");
      for (const auto& rj : cj.at("results")) {
        TrialResult r;
        r.instance = rj.at("instance").get<std::string>();
        r.seed = rj.at("seed").get<std::uint64_t>();
        r.status = rj.at("status").get<std::string>();
        r.valid = rj.at("valid").get<bool>();
        r.makespan = rj.at("makespan").get<int>();
        r.optimal_makespan = rj.at("optimal_makespan").get<int>();
        r.iterations = rj.at("iterations").get<int>();
        r.motion_failures = rj.at("motion_failures").get<int>();
        r.violation = rj.at("violation").get<std::string>();
        r.error = rj.at("error").get<std::string>();
        r.conflicts = rj.at("conflicts").get<std::uint64_t>();
        r.solve_seconds = read_opt(rj, "solve_seconds");
        c.results.push_back(std::move(r));
      }
      rep.cells.push_back(std::move(c));
    }
    rep.total_trials = j.at("totals").at("trials").get<int>();
    rep.total_successes = j.at("totals").at("successes").get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad bench report: ") + e.what());
  }
  return rep;
}

}  // namespace castl::bench

#include "castl/llm/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "castl/bench/domains.hpp"
#include "castl/constraints/json_format.hpp"
#include "castl/constraints/render.hpp"
#include "castl/constraints/script.hpp"
#include "castl/pddl/grounding.hpp"
#include "castl/pddl/parser.hpp"
#include "castl/pddl/scene.hpp"
#include "castl/util/strings.hpp"

namespace castl::llm {

using nlohmann::json;

namespace {

using util::trim;

const char* const kTemplates[] = {"system",          "disambiguate",     "detect",         "extract",
                                  "problem",         "problem_fix",      "paraphrase",     "constraints_dsl",
                                  "constraints_json", "constraints_fix", "semantic_check", "semantic_fix"};

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return {};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

std::string bullet_list(const std::vector<std::string>& items) {
  std::string out;
  for (const auto& i : items) out += "- " + i + "\n";
  return out.empty() ? "- none\n" : out;
}

/// First word of a yes/no answer, lowercased; the rest is the explanation.
std::pair<std::string, std::string> verdict(const std::string& text) {
  std::string t = trim(text);
  std::size_t i = 0;
  while (i < t.size() && !std::isalpha(static_cast<unsigned char>(t[i]))) ++i;
  std::size_t j = i;
  while (j < t.size() && std::isalpha(static_cast<unsigned char>(t[j]))) ++j;
  return {util::to_lower(t.substr(i, j - i)), trim(t.substr(j))};
}

/// Runs one request and records it.
std::string call(Provider& provider, const std::string& stage, int attempt, const std::vector<ChatMessage>& messages,
                 PipelineTrace& trace) {
  ChatRequest req{stage, messages};
  ChatResponse res;
  try {
    res = provider.complete(req);
  } catch (const ProviderError& e) {
    throw PipelineError(std::string("stage ") + stage + ": " + e.what(), trace);
  }
  StageRecord rec;
  rec.stage = stage;
  rec.attempt = attempt;
  rec.request = canonical_request(req);
  rec.response = res.text;
  rec.request_hash = res.request_hash.empty() ? request_hash(req) : res.request_hash;
  rec.input_tokens = res.input_tokens;
  rec.output_tokens = res.output_tokens;
  rec.tokens_estimated = res.tokens_estimated;
  rec.seconds = res.seconds;
  trace.calls.push_back(std::move(rec));
  return res.text;
}

std::vector<ChatMessage> conversation(const PromptAssets& assets, const std::string& user) {
  return {{"system", assets.tmpl("system")}, {"user", user}};
}

std::map<std::string, std::string> base_values(const TaskContext& ctx) {
  std::map<std::string, std::string> v;
  v["domain"] = ctx.domain_pddl;
  v["scene"] = ctx.scene_text;
  std::vector<std::string> objects;
  if (ctx.scene != nullptr) {
    for (const auto& o : ctx.scene->objects) objects.push_back(o.name + " - " + o.type);
  }
  v["objects"] = util::join(objects, ", ");
  return v;
}

Extraction parse_extraction(const std::string& text) {
  Extraction ex;
  std::vector<std::string>* current = nullptr;
  for (const auto& raw : lines_of(text)) {
    std::string line = trim(raw);
    if (line.empty()) continue;
    // Headers: "Eventual:", "## Implication constraints", "**Global:** item".
    std::string bare = line;
    bare.erase(std::remove_if(bare.begin(), bare.end(), [](char c) { return c == '#' || c == '*'; }), bare.end());
    bare = trim(bare);
    const std::string lower = util::to_lower(bare);
    std::vector<std::string>* header = nullptr;
    std::size_t len = 0;
    for (const auto& [word, list] : {std::pair<const char*, std::vector<std::string>*>{"eventual", &ex.eventual},
                                     {"implication", &ex.implication},
                                     {"global", &ex.global}}) {
      if (lower.rfind(word, 0) == 0) {
        header = list;
        len = std::string(word).size();
      }
    }
    if (header != nullptr) {
      std::string rest = bare.substr(len);
      for (const char* suffix : {"s", " constraints", " constraint"}) {
        if (util::to_lower(rest).rfind(suffix, 0) == 0) rest = rest.substr(std::string(suffix).size());
      }
      rest = trim(rest);
      if (rest.empty() || rest[0] == ':') {
        current = header;
        rest = trim(rest.empty() ? rest : rest.substr(1));
        if (!rest.empty() && util::to_lower(rest) != "none") current->push_back(rest);
        continue;
      }
    }
    if (current == nullptr) continue;
    std::size_t i = 0;
    if (line[0] == '-' || line[0] == '*' || line[0] == '+') {
      i = 1;
    } else {
      while (i < line.size() && std::isdigit(static_cast<unsigned char>(line[i]))) ++i;
      if (i > 0 && i < line.size() && (line[i] == '.' || line[i] == ')')) {
        ++i;
      } else {
        i = 0;
      }
    }
    const std::string item = trim(line.substr(i));
    if (item.empty() || util::to_lower(item) == "none" || util::to_lower(item) == "none.") continue;
    current->push_back(item);
  }
  return ex;
}

const constraints::PhraseBook& phrases_for(const std::string& domain_name) {
  static const constraints::PhraseBook empty;
  try {
    return bench::phrases(bench::parse_domain_name(domain_name));
  } catch (const ConfigError&) {
    return empty;
  }
}

void check_objects(const pddl::SceneDescription& generated, const pddl::SceneDescription& scene) {
  for (const auto& o : generated.objects) {
    if (!scene.has_object(o.name)) throw ValidationError("generated problem names unknown object '" + o.name + "'");
  }
  std::vector<logic::GroundedAtom> atoms;
  logic::collect_atoms(generated.goal, atoms);
  for (const auto& a : atoms) {
    for (const auto& arg : a.args) {
      if (!scene.has_object(arg)) throw ValidationError("goal names unknown object '" + arg + "'");
    }
  }
}

}  // namespace

std::string to_string(Target t) { return t == Target::Dsl ? "dsl" : "json"; }

Target parse_target(const std::string& s) {
  const std::string t = util::to_lower(s);
  if (t == "dsl" || t == "cstl") return Target::Dsl;
  if (t == "json") return Target::Json;
  throw ConfigError("unknown target '" + s + "' (expected dsl or json)");
}

PromptAssets PromptAssets::load(const std::string& assets_dir, const std::string& domain_name,
                                const std::string& example_domain) {
  const std::filesystem::path root(assets_dir);
  PromptAssets a;
  for (const char* name : kTemplates) {
    const auto p = root / "prompts" / (std::string(name) + ".txt");
    if (!std::filesystem::exists(p)) throw ConfigError("missing prompt template " + p.string());
    a.templates[name] = slurp(p);
  }
  const std::string ex_domain = example_domain.empty() ? domain_name : example_domain;
  const auto ex_dir = root / "examples" / ex_domain;
  if (std::filesystem::is_directory(ex_dir)) {
    for (const auto& entry : std::filesystem::directory_iterator(ex_dir)) {
      if (entry.path().extension() == ".txt") a.examples[entry.path().stem().string()] = slurp(entry.path());
    }
  }
  return a;
}

const std::string& PromptAssets::tmpl(const std::string& name) const {
  auto it = templates.find(name);
  if (it == templates.end()) throw ConfigError("prompt template '" + name + "' not loaded");
  return it->second;
}

std::string PromptAssets::example(const std::string& name) const {
  auto it = examples.find(name);
  return it == examples.end() ? std::string("(no examples)") : it->second;
}

std::string fill_template(const std::string& tmpl, const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    const auto open = tmpl.find("{{", i);
    if (open == std::string::npos) {
      out += tmpl.substr(i);
      break;
    }
    const auto close = tmpl.find("}}", open + 2);
    if (close == std::string::npos) {
      out += tmpl.substr(i);
      break;
    }
    out += tmpl.substr(i, open - i);
    const std::string key = tmpl.substr(open + 2, close - open - 2);
    auto it = values.find(key);
    out += it == values.end() ? tmpl.substr(open, close + 2 - open) : it->second;
    i = close + 2;
  }
  return out;
}

std::string strip_code_fence(const std::string& text) {
  const auto open = text.find("```");
  if (open == std::string::npos) return trim(text) + "\n";
  const auto body = text.find('\n', open);
  if (body == std::string::npos) return trim(text) + "\n";
  const auto close = text.find("```", body);
  return trim(text.substr(body + 1, close == std::string::npos ? std::string::npos : close - body - 1)) + "\n";
}

int PipelineTrace::input_tokens() const {
  int n = 0;
  for (const auto& c : calls) n += c.input_tokens;
  return n;
}

int PipelineTrace::output_tokens() const {
  int n = 0;
  for (const auto& c : calls) n += c.output_tokens;
  return n;
}

double PipelineTrace::seconds() const {
  double s = 0;
  for (const auto& c : calls) s += c.seconds;
  return s;
}

json PipelineTrace::to_json(bool timing) const {
  json calls_j = json::array();
  for (const auto& c : calls) {
    json j = {{"stage", c.stage},
              {"attempt", c.attempt},
              {"request_hash", c.request_hash},
              {"input_tokens", c.input_tokens},
              {"output_tokens", c.output_tokens},
              {"tokens_estimated", c.tokens_estimated},
              {"request", c.request},
              {"response", c.response}};
    if (timing) j["seconds"] = c.seconds;
    calls_j.push_back(std::move(j));
  }
  json out = {{"calls", calls_j},
              {"corrections", corrections},
              {"correction_attempts", correction_attempts},
              {"semantic_regenerations", semantic_regenerations},
              {"input_tokens", input_tokens()},
              {"output_tokens", output_tokens()}};
  if (timing) out["seconds"] = seconds();
  return out;
}

// ------------------------------------------------------------------ stages

Extraction extract_constraints(Provider& provider, const std::string& nl, const TaskContext& ctx,
                               const PromptAssets& assets, const PipelineOptions& options, PipelineTrace& trace) {
  auto values = base_values(ctx);
  std::string problem = trim(nl);
  Extraction ex;
  if (options.multi_step) {
    values["request"] = problem;
    values["examples"] = assets.example("disambiguate");
    problem = trim(call(provider, "disambiguate", 0, conversation(assets, fill_template(assets.tmpl("disambiguate"), values)), trace));
    if (problem.empty()) throw PipelineError("stage disambiguate: empty answer", trace);
    ex.disambiguated = problem;

    values["problem"] = problem;
    values["examples"] = assets.example("detect");
    const std::string answer = call(provider, "detect", 0, conversation(assets, fill_template(assets.tmpl("detect"), values)), trace);
    const auto [word, rest] = verdict(answer);
    if (word == "no") {
      // Only eventual constraints: the disambiguated request is the goal description.
      ex.eventual = {problem};
      return ex;
    }
    if (word != "yes") throw PipelineError("stage detect: expected yes or no, got '" + trim(answer) + "'", trace);
    ex.has_extra = true;
  } else {
    ex.disambiguated = problem;
    ex.has_extra = true;
  }

  values["problem"] = problem;
  values["examples"] = assets.example("extract");
  const std::string listed = call(provider, "extract", 0, conversation(assets, fill_template(assets.tmpl("extract"), values)), trace);
  Extraction parsed = parse_extraction(listed);
  ex.eventual = std::move(parsed.eventual);
  ex.implication = std::move(parsed.implication);
  ex.global = std::move(parsed.global);
  if (ex.eventual.empty()) throw PipelineError("stage extract: no eventual constraints in the answer", trace);
  ex.has_extra = !ex.implication.empty() || !ex.global.empty();
  return ex;
}

std::string generate_pddl_problem(Provider& provider, const std::vector<std::string>& eventuals,
                                  const TaskContext& ctx, const PromptAssets& assets, const PipelineOptions& options,
                                  PipelineTrace& trace) {
  if (eventuals.empty()) throw PipelineError("a problem needs a goal: no eventual constraints", trace);
  auto values = base_values(ctx);
  values["eventuals"] = bullet_list(eventuals);
  values["examples"] = assets.example("problem");
  auto messages = conversation(assets, fill_template(assets.tmpl("problem"), values));
  for (int attempt = 0;; ++attempt) {
    const std::string answer = call(provider, "problem", attempt, messages, trace);
    const std::string text = strip_code_fence(answer);
    std::string error;
    try {
      const pddl::SceneDescription generated = pddl::parse_problem(text, *ctx.domain);
      if (generated.goal.is_constant(true)) throw ValidationError("the problem has no goal");
      try {
        check_objects(generated, *ctx.scene);
      } catch (const ValidationError& e) {
        throw PipelineError(std::string("stage problem: ") + e.what(), trace);
      }
      pddl::SceneDescription final_scene = *ctx.scene;
      final_scene.goal = generated.goal;
      if (final_scene.name.empty()) final_scene.name = generated.name;
      final_scene.domain_name = ctx.domain->name;
      const pddl::GroundedTask check(*ctx.domain, final_scene);  // surfaces type errors in the goal
      (void)check;
      return pddl::print_problem(final_scene);
    } catch (const PipelineError&) {
      throw;
    } catch (const Error& e) {
      error = e.what();
    }
    if (attempt >= options.problem_corrections) {
      throw PipelineError("stage problem: answer does not parse after " + std::to_string(attempt + 1) +
                              " attempts: " + error,
                          trace);
    }
    ++trace.corrections["problem"];
    values["error"] = error;
    messages.push_back({"assistant", answer});
    messages.push_back({"user", fill_template(assets.tmpl("problem_fix"), values)});
  }
}

namespace {

/// Stage B with corrective re-prompting. `messages` ends with the user request.
std::pair<std::string, constraints::ConstraintSet> translate_with_corrections(
    Provider& provider, std::vector<ChatMessage>& messages, const pddl::GroundedTask& task,
    const PromptAssets& assets, const PipelineOptions& options, PipelineTrace& trace, int& attempt) {
  for (int corrections = 0;; ++corrections) {
    const std::string answer = call(provider, "constraints", attempt++, messages, trace);
    const std::string text = strip_code_fence(answer);
    std::string error;
    try {
      auto set = options.target == Target::Dsl ? constraints::parse_constraint_script(text, task)
                                               : constraints::parse_constraint_json(text, task);
      messages.push_back({"assistant", answer});
      return {text, std::move(set)};
    } catch (const Error& e) {
      error = e.what();
    }
    if (corrections >= options.correction_budget) {
      throw PipelineError("stage constraints: still invalid after " + std::to_string(corrections) +
                              " corrections: " + error,
                          trace);
    }
    ++trace.correction_attempts;
    ++trace.corrections["constraints"];
    messages.push_back({"assistant", answer});
    messages.push_back({"user", fill_template(assets.tmpl("constraints_fix"), {{"error", error}})});
  }
}

}  // namespace

ScriptResult generate_constraint_script(Provider& provider, const std::vector<std::string>& constraints_nl,
                                        const pddl::GroundedTask& task, const TaskContext& ctx,
                                        const PromptAssets& assets, const PipelineOptions& options,
                                        PipelineTrace& trace) {
  ScriptResult out;
  if (constraints_nl.empty()) return out;
  auto values = base_values(ctx);
  values["constraints"] = bullet_list(constraints_nl);
  values["examples"] = assets.example("paraphrase");
  out.paraphrase = trim(call(provider, "paraphrase", 0, conversation(assets, fill_template(assets.tmpl("paraphrase"), values)), trace));

  values["paraphrase"] = out.paraphrase;
  const bool dsl = options.target == Target::Dsl;
  values["examples"] = assets.example(dsl ? "dsl" : "json");
  auto messages = conversation(assets, fill_template(assets.tmpl(dsl ? "constraints_dsl" : "constraints_json"), values));
  int attempt = 0;
  auto [text, set] = translate_with_corrections(provider, messages, task, assets, options, trace, attempt);
  if (!options.semantic_check) {
    out.text = std::move(text);
    out.constraints = std::move(set);
    return out;
  }

  const auto& book = phrases_for(task.domain().name);
  std::vector<std::string> renderings;
  for (int round = 0;; ++round) {
    std::string rendering;
    for (const auto& line : constraints::render_constraints_nl(set, book)) rendering += "- " + line + "\n";
    if (rendering.empty()) rendering = "- (no constraints)\n";
    renderings.push_back(rendering);
    values["rendering"] = rendering;
    values["examples"] = assets.example("semantic_check");
    const std::string answer = call(provider, "semantic-check", round,
                                    conversation(assets, fill_template(assets.tmpl("semantic_check"), values)), trace);
    const auto [word, why] = verdict(answer);
    if (word == "yes") break;
    if (word != "no") throw PipelineError("stage semantic-check: expected yes or no, got '" + trim(answer) + "'", trace);
    if (round >= 1) {
      throw PipelineError("stage semantic-check: constraints still inconsistent with the request after regeneration",
                          trace, renderings);
    }
    ++trace.semantic_regenerations;
    messages.push_back({"user", fill_template(assets.tmpl("semantic_fix"), {{"feedback", why}, {"rendering", rendering}})});
    std::tie(text, set) = translate_with_corrections(provider, messages, task, assets, options, trace, attempt);
  }
  out.text = std::move(text);
  out.constraints = std::move(set);
  return out;
}

Translation translate(Provider& provider, const std::string& nl, const std::string& domain_pddl,
                      const json& scene_json, const PromptAssets& assets, const PipelineOptions& options) {
  const pddl::DomainModel domain = pddl::parse_domain(domain_pddl);
  const pddl::SceneDescription scene = pddl::scene_from_json(scene_json, domain);
  TaskContext ctx;
  ctx.domain_pddl = domain_pddl;
  ctx.scene_text = scene_json.dump(2);
  ctx.domain = &domain;
  ctx.scene = &scene;

  Translation out;
  out.extraction = extract_constraints(provider, nl, ctx, assets, options, out.trace);
  out.problem_pddl = generate_pddl_problem(provider, out.extraction.eventual, ctx, assets, options, out.trace);

  pddl::SceneDescription full = pddl::parse_problem(out.problem_pddl, domain);
  full.attributes = scene.attributes;
  full.geometry = scene.geometry;
  const pddl::GroundedTask task(domain, full);
  std::vector<std::string> extra = out.extraction.implication;
  extra.insert(extra.end(), out.extraction.global.begin(), out.extraction.global.end());
  auto script = generate_constraint_script(provider, extra, task, ctx, assets, options, out.trace);
  out.constraints_text = std::move(script.text);
  out.constraints = std::move(script.constraints);
  return out;
}

}  // namespace castl::llm

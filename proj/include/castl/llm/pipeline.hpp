#pragma once

#include <map>
#include <string>
#include <vector>

#include "castl/constraints/constraint.hpp"
#include "castl/llm/provider.hpp"
#include "castl/pddl/model.hpp"
#include "json.hpp"

namespace castl::llm {

enum class Target { Dsl, Json };

std::string to_string(Target t);
Target parse_target(const std::string& s);

/// Prompt templates (`{{name}}` placeholders) and per-domain in-context examples, read
/// from an assets directory:
///
///   prompts/<stage>.txt             templates shared by all domains
///   examples/<domain>/<stage>.txt   examples; missing files mean no examples
struct PromptAssets {
  std::map<std::string, std::string> templates;
  std::map<std::string, std::string> examples;

  /// `example_domain` selects another domain's examples (cross-domain reuse); empty means
  /// the task's own domain. Throws ConfigError if a template is missing.
  static PromptAssets load(const std::string& assets_dir, const std::string& domain_name,
                           const std::string& example_domain = "");

  const std::string& tmpl(const std::string& name) const;
  std::string example(const std::string& name) const;
};

/// Replaces each `{{key}}` by its value; unknown keys are left as they are.
std::string fill_template(const std::string& tmpl, const std::map<std::string, std::string>& values);

struct PipelineOptions {
  Target target = Target::Dsl;
  int correction_budget = 3;  // re-prompts after a constraint parse error
  int problem_corrections = 1;
  bool semantic_check = true;
  bool multi_step = true;  // false: extract straight from the raw request
};

struct StageRecord {
  std::string stage;
  int attempt = 0;  // 0 for the first request of a stage, then one per re-prompt
  std::string request;
  std::string response;
  std::string request_hash;
  int input_tokens = 0;
  int output_tokens = 0;
  bool tokens_estimated = false;
  double seconds = 0;
};

struct PipelineTrace {
  std::vector<StageRecord> calls;
  std::map<std::string, int> corrections;  // re-prompts per stage
  int correction_attempts = 0;             // constraint-stage re-prompts after syntax errors
  int semantic_regenerations = 0;

  int input_tokens() const;
  int output_tokens() const;
  double seconds() const;

  /// Without timing the JSON is identical for identical replayed runs.
  nlohmann::json to_json(bool timing = false) const;
};

/// Carries the trace up to the failure and, for a failed semantic check, both renderings.
class PipelineError : public Error {
 public:
  PipelineError(const std::string& message, PipelineTrace trace, std::vector<std::string> renderings = {})
      : Error(message), trace_(std::move(trace)), renderings_(std::move(renderings)) {}

  const PipelineTrace& trace() const { return trace_; }
  const std::vector<std::string>& renderings() const { return renderings_; }

 private:
  PipelineTrace trace_;
  std::vector<std::string> renderings_;
};

/// What the language model is told about the task.
struct TaskContext {
  std::string domain_pddl;
  std::string scene_text;  // scene JSON as shown to the model
  const pddl::DomainModel* domain = nullptr;
  const pddl::SceneDescription* scene = nullptr;  // objects, init, attributes; goal unused
};

struct Extraction {
  std::string disambiguated;
  bool has_extra = false;  // implication or global constraints present
  std::vector<std::string> eventual;
  std::vector<std::string> implication;
  std::vector<std::string> global;
};

/// Disambiguation, detection and (if detection says so) categorised extraction.
Extraction extract_constraints(Provider& provider, const std::string& nl, const TaskContext& ctx,
                               const PromptAssets& assets, const PipelineOptions& options, PipelineTrace& trace);

/// Asks for a PDDL problem for the eventual constraints and keeps only its goal: the
/// returned problem has the scene's objects and initial state. Throws PipelineError when
/// the answer does not parse after the allowed re-prompts or names objects the scene lacks.
std::string generate_pddl_problem(Provider& provider, const std::vector<std::string>& eventuals,
                                  const TaskContext& ctx, const PromptAssets& assets, const PipelineOptions& options,
                                  PipelineTrace& trace);

struct ScriptResult {
  std::string paraphrase;
  std::string text;  // final DSL or JSON answer
  constraints::ConstraintSet constraints;  // resolved
};

/// Paraphrase, translation to DSL/JSON with corrective re-prompting, and the semantic
/// self-check (one regeneration on mismatch).
ScriptResult generate_constraint_script(Provider& provider, const std::vector<std::string>& constraints_nl,
                                        const pddl::GroundedTask& task, const TaskContext& ctx,
                                        const PromptAssets& assets, const PipelineOptions& options,
                                        PipelineTrace& trace);

struct Translation {
  Extraction extraction;
  std::string problem_pddl;
  std::string constraints_text;
  constraints::ConstraintSet constraints;
  PipelineTrace trace;
};

/// The whole chain for one request. Errors other than configuration errors are reported
/// as PipelineError with the trace so far.
Translation translate(Provider& provider, const std::string& nl, const std::string& domain_pddl,
                      const nlohmann::json& scene_json, const PromptAssets& assets, const PipelineOptions& options);

/// Strips a surrounding Markdown code fence, if any.
std::string strip_code_fence(const std::string& text);

}  // namespace castl::llm

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "castl/bench/domains.hpp"

namespace castl::bench {

/// Which constraint classes an instance carries besides its goal.
enum class Profile { No, Impl, Glob, ImplGlob, ImplGlobAttr };

std::string to_string(Profile p);
/// Accepts "no", "impl", "glob", "implglob", "implglobattr" (any case).
Profile parse_profile(std::string_view name);
const std::vector<Profile>& all_profiles();

/// Size parameters of a tier.
struct TierSpec {
  int min_size = 0;  // blocks, rooms or children
  int max_size = 0;
  int bound = 30;    // horizon bound used for the solvability check
};

TierSpec tier_spec(Domain d, int tier);

/// One generated benchmark instance. All texts are final file contents.
struct Instance {
  Domain domain = Domain::BW;
  int tier = 1;
  Profile profile = Profile::No;
  std::uint64_t seed = 0;
  int attempts = 0;           // rejection-sampling attempts used
  int optimal_makespan = -1;  // from the breadth-first oracle
  std::string name;

  std::string domain_pddl;
  std::string problem_pddl;
  std::string scene_json;
  std::string constraints_cstl;
  std::string constraints_json;
  std::string nl_prompt;
  std::string ground_truth_json;
};

/// Deterministic per (domain, tier, profile, seed). Draws candidate scenes and
/// constraints until the breadth-first oracle finds a plan within the tier's bound and
/// the profile's constraint classes are all present. Throws castl::Error if no candidate
/// is accepted within a fixed number of attempts.
Instance generate(Domain domain, int tier, Profile profile, std::uint64_t seed);

/// Writes domain.pddl, problem.pddl, scene.json, constraints.cstl, constraints.json,
/// nl_prompt.txt and ground_truth.json into `dir` (created if missing).
void write_instance(const Instance& inst, const std::filesystem::path& dir);

}  // namespace castl::bench

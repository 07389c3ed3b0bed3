#pragma once

#include "castl/pddl/model.hpp"
#include "json.hpp"

namespace castl::pddl {

/// Merges a scene sidecar into a parsed problem. Recognised keys:
///
///   {"attributes": {"red": ["b1", "b2"]}, "geometry": {...}}
///
/// Every attribute member must be a declared object (ValidationError otherwise).
void apply_scene_json(SceneDescription& scene, const nlohmann::json& sidecar,
                      const DomainModel& domain);

/// Builds a partial problem (objects, init, attributes, geometry; goal left `true`)
/// from a scene file that additionally carries
///
///   {"name": "...", "objects": {"b1": "block"}, "init": [["on_table", "b1", "t1"]]}
///
/// This is the environment handed to the translation pipeline.
SceneDescription scene_from_json(const nlohmann::json& scene_json, const DomainModel& domain);

nlohmann::json scene_to_json(const SceneDescription& scene);

}  // namespace castl::pddl

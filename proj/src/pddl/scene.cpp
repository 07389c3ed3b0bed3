#include "castl/pddl/scene.hpp"

#include <algorithm>

#include "castl/error.hpp"

namespace castl::pddl {

namespace {

void read_attributes(SceneDescription& scene, const nlohmann::json& attrs) {
  if (!attrs.is_object()) throw ValidationError("scene 'attributes' must be an object");
  for (const auto& [name, members] : attrs.items()) {
    if (!members.is_array()) throw ValidationError("attribute '" + name + "' must be a list of objects");
    std::set<std::string> objs;
    for (const auto& m : members) {
      if (!m.is_string()) throw ValidationError("attribute '" + name + "' lists a non-string member");
      std::string o = m.get<std::string>();
      std::transform(o.begin(), o.end(), o.begin(), [](unsigned char c) { return std::tolower(c); });
      if (!scene.has_object(o)) {
        throw ValidationError("attribute '" + name + "' references unknown object '" + o + "'");
      }
      objs.insert(o);
    }
    std::string key = name;
    std::transform(key.begin(), key.end(), key.begin(), [](unsigned char c) { return std::tolower(c); });
    scene.attributes[key] = std::move(objs);
  }
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

void apply_scene_json(SceneDescription& scene, const nlohmann::json& sidecar, const DomainModel& domain) {
  (void)domain;
  if (!sidecar.is_object()) throw ValidationError("scene sidecar must be a JSON object");
  if (sidecar.contains("attributes")) read_attributes(scene, sidecar.at("attributes"));
  if (sidecar.contains("geometry")) scene.geometry = sidecar.at("geometry");
}

SceneDescription scene_from_json(const nlohmann::json& j, const DomainModel& domain) {
  if (!j.is_object()) throw ValidationError("scene file must be a JSON object");
  SceneDescription scene;
  scene.name = lower(j.value("name", std::string("scene")));
  scene.domain_name = domain.name;
  if (j.contains("objects")) {
    const auto& objs = j.at("objects");
    if (!objs.is_object()) throw ValidationError("scene 'objects' must map object names to types");
    for (const auto& [name, type] : objs.items()) {
      const std::string t = lower(type.get<std::string>());
      if (!domain.has_type(t)) throw ValidationError("unknown object type '" + t + "' for '" + name + "'");
      scene.objects.push_back({lower(name), t});
    }
  }
  if (j.contains("init")) {
    for (const auto& a : j.at("init")) {
      if (!a.is_array() || a.empty()) throw ValidationError("scene 'init' entries must be non-empty arrays");
      GroundedAtom atom{lower(a.at(0).get<std::string>()), {}};
      const PredicateSchema* schema = domain.find_predicate(atom.predicate);
      if (schema == nullptr) throw ValidationError("atom uses undeclared predicate '" + atom.predicate + "'");
      if (a.size() - 1 != schema->params.size()) {
        throw ValidationError("arity mismatch for '" + atom.predicate + "'");
      }
      for (std::size_t i = 1; i < a.size(); ++i) {
        std::string o = lower(a.at(i).get<std::string>());
        const std::string* type = scene.type_of(o);
        if (type == nullptr) throw ValidationError("unknown object '" + o + "'");
        if (!domain.is_subtype(*type, schema->params[i - 1].type)) {
          throw ValidationError("type mismatch: '" + o + "' used as '" + schema->params[i - 1].type + "'");
        }
        atom.args.push_back(std::move(o));
      }
      scene.init.push_back(std::move(atom));
    }
    std::sort(scene.init.begin(), scene.init.end());
    scene.init.erase(std::unique(scene.init.begin(), scene.init.end()), scene.init.end());
  }
  apply_scene_json(scene, j, domain);
  return scene;
}

nlohmann::json scene_to_json(const SceneDescription& scene) {
  nlohmann::json j;
  j["name"] = scene.name;
  nlohmann::json objs = nlohmann::json::object();
  for (const auto& o : scene.objects) objs[o.name] = o.type;
  j["objects"] = objs;
  nlohmann::json init = nlohmann::json::array();
  for (const auto& a : scene.init) {
    nlohmann::json row = nlohmann::json::array({a.predicate});
    for (const auto& arg : a.args) row.push_back(arg);
    init.push_back(row);
  }
  j["init"] = init;
  nlohmann::json attrs = nlohmann::json::object();
  for (const auto& [name, members] : scene.attributes) attrs[name] = members;
  j["attributes"] = attrs;
  if (scene.geometry) j["geometry"] = *scene.geometry;
  return j;
}

}  // namespace castl::pddl

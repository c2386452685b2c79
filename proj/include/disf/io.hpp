#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>

#include "disf/baselines.hpp"
#include "disf/ply.hpp"
#include "disf/solvers.hpp"
#include "disf/synth.hpp"
#include "json.hpp"

namespace disf {

using json = nlohmann::json;

// ---------------------------------------------------------------------------
// Small JSON helpers

inline Vec3 vec3_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 3)
    throw InvalidInput(what + " must be an array of 3 numbers");
  Vec3 v;
  for (int i = 0; i < 3; ++i) {
    if (!j[i].is_number()) throw InvalidInput(what + " must contain numbers");
    v[i] = j[i].get<double>();
  }
  if (!v.allFinite()) throw InvalidInput(what + " is not finite");
  return v;
}

inline json to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline json to_json_row_major(const Mat3& m) {
  json a = json::array();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a.push_back(m(r, c));
  return a;
}

inline Mat3 mat3_from_json(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 9)
    throw InvalidInput(what + " must be an array of 9 numbers (row-major)");
  Mat3 m;
  for (int k = 0; k < 9; ++k) {
    if (!j[k].is_number()) throw InvalidInput(what + " must contain numbers");
    m(k / 3, k % 3) = j[k].get<double>();
  }
  return m;
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidInput(std::string("field '") + key + "' has the wrong type");
  }
}

inline json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& err) {
    throw InvalidInput(path.string() + ": " + err.what());
  }
}

// ---------------------------------------------------------------------------
// Quality reports and plans

inline json to_json(const QualityReport& q) {
  return {{"ep", q.ep},         {"en", q.en},         {"ea", q.ea},
          {"e_na", q.e_na},     {"e_geom", q.e_geom}, {"e_com", q.e_com},
          {"iteration", q.iteration}};
}

inline QualityReport quality_from_json(const json& j) {
  QualityReport q;
  q.ep = get_or(j, "ep", 0.0);
  q.en = get_or(j, "en", 0.0);
  q.ea = get_or(j, "ea", 0.0);
  q.e_na = get_or(j, "e_na", 0.0);
  q.e_geom = get_or(j, "e_geom", 0.0);
  q.e_com = get_or(j, "e_com", 0.0);
  q.iteration = get_or(j, "iteration", 0);
  return q;
}

inline json to_json(const PlannerConfig& c) {
  return {{"alpha", c.weights.alpha},
          {"beta", c.weights.beta},
          {"d0", c.d0},
          {"d_min", c.d_min},
          {"d_max", c.d_max},
          {"delta_e", c.delta_e},
          {"max_iterations", c.max_iterations},
          {"n_app", to_json(c.n_app.vec())},
          {"correspondence",
           c.mode == CorrespondenceMode::kNearest ? "nearest" : "fixed"},
          {"max_normal_angle", c.max_normal_angle},
          {"damping", c.damping}};
}

inline PlannerConfig planner_config_from_json(const json& j) {
  PlannerConfig c;
  c.weights.alpha = get_or(j, "alpha", c.weights.alpha);
  c.weights.beta = get_or(j, "beta", c.weights.beta);
  c.d0 = get_or(j, "d0", c.d0);
  c.d_min = get_or(j, "d_min", c.d_min);
  c.d_max = get_or(j, "d_max", c.d_max);
  c.delta_e = get_or(j, "delta_e", c.delta_e);
  c.max_iterations = get_or(j, "max_iterations", c.max_iterations);
  if (j.contains("n_app")) c.n_app = UnitVec3(vec3_from_json(j["n_app"], "n_app"));
  const auto mode = get_or<std::string>(j, "correspondence", "nearest");
  if (mode == "nearest")
    c.mode = CorrespondenceMode::kNearest;
  else if (mode == "fixed")
    c.mode = CorrespondenceMode::kFixed;
  else
    throw InvalidInput("unknown correspondence mode '" + mode + "'");
  c.max_normal_angle = get_or(j, "max_normal_angle", c.max_normal_angle);
  c.damping = get_or(j, "damping", c.damping);
  c.validate();
  return c;
}

inline json to_json(const PadConfig& p) {
  return {{"pad_width", p.width},
          {"pad_height", p.height},
          {"columns", p.columns},
          {"rows", p.rows},
          {"rest_aperture", p.rest_aperture},
          {"d_min", p.d_min},
          {"d_max", p.d_max},
          {"v0", to_json(p.v0.vec())},
          {"n_z0", to_json(p.n_z0.vec())}};
}

inline PadConfig pad_config_from_json(const json& j) {
  PadConfig p;
  p.width = get_or(j, "pad_width", p.width);
  p.height = get_or(j, "pad_height", p.height);
  p.columns = get_or(j, "columns", p.columns);
  p.rows = get_or(j, "rows", p.rows);
  p.rest_aperture = get_or(j, "rest_aperture", p.rest_aperture);
  p.d_min = get_or(j, "d_min", p.d_min);
  p.d_max = get_or(j, "d_max", p.d_max);
  if (j.contains("v0")) p.v0 = UnitVec3(vec3_from_json(j["v0"], "v0"));
  if (j.contains("n_z0")) p.n_z0 = UnitVec3(vec3_from_json(j["n_z0"], "n_z0"));
  return p;
}

// Gripper from a config: flat pads by default, or explicit fingertip clouds
// given as "finger1"/"finger2" PLY paths (relative to `base_dir`).
inline GripperModel gripper_from_json(const json& j,
                                      const std::filesystem::path& base_dir = {}) {
  const PadConfig pads = pad_config_from_json(j);
  GripperModel model = default_parallel_gripper(pads);
  if (j.contains("finger1") || j.contains("finger2")) {
    if (!j.contains("finger1") || !j.contains("finger2"))
      throw InvalidInput("gripper config needs both finger1 and finger2");
    model.fingers[0] = load_cloud(base_dir / j["finger1"].get<std::string>());
    model.fingers[1] = load_cloud(base_dir / j["finger2"].get<std::string>());
    model.validate();
  }
  return model;
}

inline json to_json(const FixedPairSpec& spec) {
  json pairs = json::array();
  for (const auto& p : spec.pairs)
    pairs.push_back({p.finger_index, p.object_index, p.finger});
  return {{"object_id", spec.object_id}, {"pairs", pairs}};
}

inline FixedPairSpec fixed_pairs_from_json(const json& j) {
  FixedPairSpec spec;
  spec.object_id = get_or<std::string>(j, "object_id", "");
  if (!j.contains("pairs") || !j["pairs"].is_array())
    throw InvalidInput("fixed pair spec needs a 'pairs' array");
  for (const auto& row : j["pairs"]) {
    if (!row.is_array() || row.size() != 3)
      throw InvalidInput("each fixed pair is [finger_idx, object_idx, j]");
    for (const auto& v : row)
      if (!v.is_number_integer() || v.get<long long>() < 0)
        throw InvalidInput("fixed pair entries must be non-negative integers");
    FixedPair p;
    p.finger_index = row[0].get<std::size_t>();
    p.object_index = row[1].get<std::size_t>();
    p.finger = row[2].get<int>();
    if (p.finger != 1 && p.finger != 2)
      throw InvalidInput("fixed pair finger must be 1 or 2");
    spec.pairs.push_back(p);
  }
  if (spec.pairs.empty()) throw InvalidInput("fixed pair list is empty");
  return spec;
}

inline json to_json(const GraspPlan& plan) {
  json trace = json::array();
  for (const auto& q : plan.trace) trace.push_back(to_json(q));
  return {{"planner", plan.planner},
          {"rotation", to_json_row_major(plan.rotation)},
          {"translation", to_json(plan.translation)},
          {"dd", plan.dd},
          {"d0", plan.d0},
          {"d_final", plan.d_final},
          {"iterations", plan.iterations},
          {"converged", plan.converged},
          {"pairs",
           {{"first", plan.pairs_first},
            {"second", plan.pairs_second},
            {"total", plan.pairs_total()}}},
          {"planning_ms", plan.planning_ms},
          {"trace", trace}};
}

inline GraspPlan plan_from_json(const json& j) {
  GraspPlan plan;
  try {
    plan.planner = get_or<std::string>(j, "planner", "disf");
    plan.rotation = mat3_from_json(j.at("rotation"), "rotation");
    plan.translation = vec3_from_json(j.at("translation"), "translation");
    plan.dd = j.at("dd").get<double>();
    plan.d0 = j.at("d0").get<double>();
    plan.d_final = get_or(j, "d_final", plan.d0 + plan.dd);
    plan.iterations = get_or(j, "iterations", 0);
    plan.converged = get_or(j, "converged", false);
    plan.planning_ms = get_or(j, "planning_ms", 0.0);
    if (j.contains("pairs")) {
      plan.pairs_first = get_or<std::size_t>(j["pairs"], "first", 0);
      plan.pairs_second = get_or<std::size_t>(j["pairs"], "second", 0);
    }
    if (j.contains("trace"))
      for (const auto& q : j["trace"]) plan.trace.push_back(quality_from_json(q));
  } catch (const json::exception& err) {
    throw InvalidInput(std::string("malformed plan: ") + err.what());
  }
  if (!is_rotation(plan.rotation, 1e-8))
    throw InvalidInput("plan rotation is not a proper rotation matrix");
  return plan;
}

// ---------------------------------------------------------------------------
// Scenes

constexpr double kDefaultStandoff = 0.02;

struct SceneSpec {
  std::string name = "scene";
  std::optional<SyntheticObject> generator;
  std::optional<std::filesystem::path> file;
  UnitVec3 n_app{0.0, 0.0, 1.0};
  std::optional<FixedPairSpec> fixed_pairs;
  std::optional<InitialPose> initial_pose;
  double standoff = kDefaultStandoff;

  void validate() const {
    if (generator.has_value() == file.has_value())
      throw InvalidInput("scene '" + name +
                         "' needs exactly one object source (generator or file)");
    if (generator) generator->validate();
    if (!(std::isfinite(standoff))) throw InvalidInput("standoff is not finite");
  }
};

inline json to_json(const SyntheticObject& s) {
  return {{"generator", to_string(s.kind)},
          {"dimensions", s.dimensions},
          {"resolution", s.resolution},
          {"center", to_json(s.center)}};
}

inline SyntheticObject synthetic_from_json(const json& j) {
  SyntheticObject s;
  s.kind = object_kind_from_string(j.at("generator").get<std::string>());
  if (!j.contains("dimensions") || !j["dimensions"].is_array())
    throw InvalidInput("generator needs a 'dimensions' array");
  s.dimensions.clear();
  for (const auto& d : j["dimensions"]) {
    if (!d.is_number()) throw InvalidInput("dimensions must be numbers");
    s.dimensions.push_back(d.get<double>());
  }
  s.resolution = get_or(j, "resolution", s.resolution);
  if (j.contains("center")) s.center = vec3_from_json(j["center"], "center");
  s.validate();
  return s;
}

inline json to_json(const SceneSpec& s) {
  json j;
  j["name"] = s.name;
  if (s.generator) j["object"] = to_json(*s.generator);
  if (s.file) j["object"] = {{"file", s.file->string()}};
  j["n_app"] = to_json(s.n_app.vec());
  j["standoff"] = s.standoff;
  if (s.fixed_pairs) j["correspondences"] = to_json(*s.fixed_pairs);
  if (s.initial_pose)
    j["initial_pose"] = {{"rotation", to_json_row_major(s.initial_pose->rotation)},
                         {"translation", to_json(s.initial_pose->translation)}};
  return j;
}

inline SceneSpec scene_from_json(const json& j,
                                 const std::filesystem::path& base_dir = {}) {
  SceneSpec s;
  try {
    s.name = get_or<std::string>(j, "name", "scene");
    if (!j.contains("object")) throw InvalidInput("scene has no 'object'");
    const auto& obj = j["object"];
    const bool has_gen = obj.contains("generator");
    const bool has_file = obj.contains("file");
    if (has_gen == has_file)
      throw InvalidInput("scene object needs exactly one of 'generator' or 'file'");
    if (has_gen) s.generator = synthetic_from_json(obj);
    if (has_file) s.file = base_dir / obj["file"].get<std::string>();
    if (j.contains("n_app")) s.n_app = UnitVec3(vec3_from_json(j["n_app"], "n_app"));
    s.standoff = get_or(j, "standoff", s.standoff);
    if (j.contains("correspondences")) {
      const auto& c = j["correspondences"];
      s.fixed_pairs = c.is_string()
                          ? fixed_pairs_from_json(
                                read_json_file(base_dir / c.get<std::string>()))
                          : fixed_pairs_from_json(c);
    }
    if (j.contains("initial_pose")) {
      InitialPose p;
      const auto& ip = j["initial_pose"];
      if (ip.contains("rotation")) p.rotation = mat3_from_json(ip["rotation"], "rotation");
      if (ip.contains("translation"))
        p.translation = vec3_from_json(ip["translation"], "translation");
      if (!is_rotation(p.rotation, 1e-8))
        throw InvalidInput("initial rotation is not a proper rotation matrix");
      s.initial_pose = p;
    }
  } catch (const json::exception& err) {
    throw InvalidInput(std::string("malformed scene: ") + err.what());
  }
  s.validate();
  return s;
}

inline SceneSpec load_scene(const std::filesystem::path& path) {
  return scene_from_json(read_json_file(path), path.parent_path());
}

inline OrientedSurface load_object(const SceneSpec& s) {
  s.validate();
  return s.generator ? generate(*s.generator) : load_cloud(*s.file);
}

// Identity rotation; gripper centroid placed `standoff` behind the object
// centroid along -n_app.
inline InitialPose default_initial_pose(const OrientedSurface& object,
                                        const GripperModel& gripper,
                                        const UnitVec3& n_app, double standoff) {
  InitialPose p;
  p.translation = centroid(object) - standoff * n_app.vec() -
                  combined_centroid(gripper.fingers);
  return p;
}

inline Problem make_problem(const SceneSpec& scene, const GripperModel& gripper) {
  Problem p;
  p.object = load_object(scene);
  p.gripper = gripper;
  p.initial = scene.initial_pose
                  ? *scene.initial_pose
                  : default_initial_pose(p.object, gripper, scene.n_app,
                                         scene.standoff);
  p.fixed_pairs = scene.fixed_pairs;
  return p;
}

// The scene owns the approach direction; everything else comes from `base`.
inline PlannerConfig config_for(const SceneSpec& scene, PlannerConfig base) {
  base.n_app = scene.n_app;
  if (scene.fixed_pairs) base.mode = CorrespondenceMode::kFixed;
  return base;
}

// The synthetic benchmark suite: one scene per generator kind, each placed
// away from the origin.
inline std::vector<SceneSpec> default_suite() {
  auto scene = [](std::string name, ObjectKind kind, std::vector<double> dims,
                  int res, Vec3 center, Vec3 n_app) {
    SceneSpec s;
    s.name = std::move(name);
    s.generator = SyntheticObject{kind, std::move(dims), res, center};
    s.n_app = UnitVec3(n_app);
    return s;
  };
  return {
      scene("slab", ObjectKind::kSlab, {0.06, 0.03, 0.06}, 12,
            Vec3(0.04, -0.03, 0.12), Vec3::UnitZ()),
      scene("box", ObjectKind::kBox, {0.05, 0.04, 0.08}, 16,
            Vec3(-0.05, 0.02, 0.10), Vec3::UnitZ()),
      scene("cylinder", ObjectKind::kCylinder, {0.025, 0.10}, 32,
            Vec3(0.02, 0.05, 0.08), Vec3::UnitZ()),
      scene("offset-composite", ObjectKind::kOffsetComposite,
            {0.12, 0.03, 0.03, 0.04, 0.06, 0.05}, 24, Vec3(-0.03, 0.01, 0.15),
            Vec3::UnitZ()),
      scene("plate", ObjectKind::kPlate, {0.12, 0.015, 0.10}, 24,
            Vec3(0.06, 0.0, 0.05), Vec3::UnitZ()),
      scene("sphere", ObjectKind::kSphere, {0.03}, 16, Vec3(0.0, -0.04, 0.09),
            Vec3::UnitX()),
  };
}

}  // namespace disf

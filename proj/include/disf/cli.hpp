#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "disf/bench.hpp"
#include "disf/log.hpp"

namespace disf::cli {

enum ExitCode { kOk = 0, kUsage = 1, kSceneError = 2, kPlannerError = 3 };

// Flags shared by plan, eval and bench. Unset values keep the defaults.
struct ConfigFlags {
  std::optional<double> alpha, beta, d0, dmin, dmax, delta_e;
  std::optional<int> max_iters;
  std::optional<double> max_normal_angle_deg;
  std::optional<std::string> gripper;  // gripper JSON path

  PlannerConfig apply(PlannerConfig c) const {
    if (alpha) c.weights.alpha = *alpha;
    if (beta) c.weights.beta = *beta;
    if (d0) c.d0 = *d0;
    if (dmin) c.d_min = *dmin;
    if (dmax) c.d_max = *dmax;
    if (delta_e) c.delta_e = *delta_e;
    if (max_iters) c.max_iterations = *max_iters;
    if (max_normal_angle_deg)
      c.max_normal_angle = *max_normal_angle_deg * std::numbers::pi / 180.0;
    c.validate();
    return c;
  }

  GripperModel gripper_model() const {
    GripperModel g;
    if (gripper) {
      const std::filesystem::path path(*gripper);
      g = gripper_from_json(read_json_file(path), path.parent_path());
    } else {
      g = default_parallel_gripper();
    }
    if (dmin) g.d_min = *dmin;
    if (dmax) g.d_max = *dmax;
    g.validate();
    return g;
  }
};

struct CmaFlags {
  std::optional<int> population, generations;
  std::optional<double> sigma0;

  CmaEsConfig apply(CmaEsConfig c, std::optional<std::uint64_t> seed) const {
    if (population) c.population = *population;
    if (generations) c.generations = *generations;
    if (sigma0) c.sigma0 = *sigma0;
    if (seed) c.seed = *seed;
    c.validate();
    return c;
  }
};

// A scene argument is a JSON file path, or the name of a built-in suite
// scene (optionally written "suite:<name>").
inline SceneSpec resolve_scene(const std::string& arg) {
  std::string name = arg;
  const bool forced = name.rfind("suite:", 0) == 0;
  if (forced) name = name.substr(6);
  if (!forced && std::filesystem::exists(arg)) return load_scene(arg);
  for (const auto& s : default_suite())
    if (s.name == name) return s;
  if (forced) throw InvalidInput("no built-in scene named '" + name + "'");
  throw InvalidInput("cannot open scene '" + arg + "'");
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  for (std::string item; std::getline(in, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

// Writes to --out when given, otherwise to `fallback`.
inline void emit(const std::optional<std::string>& path, std::ostream& fallback,
                 const std::function<void(std::ostream&)>& body) {
  if (!path) {
    body(fallback);
    return;
  }
  std::ofstream file(*path);
  if (!file) throw InvalidInput("cannot write '" + *path + "'");
  body(file);
}

inline void report_error(std::ostream& err, const char* kind,
                         const std::string& message) {
  err << json{{"error", {{"kind", kind}, {"message", message}}}}.dump() << '\n';
}

// Maps library errors onto exit codes. Scene and input problems are 2,
// planner failures are 3.
inline int guarded(std::ostream& err, const std::function<void()>& body) {
  try {
    body();
    return kOk;
  } catch (const PlannerError& e) {
    log_error(e.what());
    report_error(err, "planner", e.what());
    return kPlannerError;
  } catch (const Error& e) {
    log_error(e.what());
    report_error(err, "scene", e.what());
    return kSceneError;
  } catch (const json::exception& e) {
    log_error(e.what());
    report_error(err, "scene", e.what());
    return kSceneError;
  }
}

inline void write_trace_csv(std::ostream& out, const std::vector<QualityReport>& trace) {
  out << "iteration,ep,en,ea,e_na,e_geom,e_com\n";
  char buf[256];
  for (const auto& q : trace) {
    std::snprintf(buf, sizeof buf, "%d,%.10e,%.10e,%.10e,%.10e,%.10e,%.10e\n",
                  q.iteration, q.ep, q.en, q.ea, q.e_na, q.e_geom, q.e_com);
    out << buf;
  }
}

// ---------------------------------------------------------------------------
// plan

struct PlanOptions {
  std::string scene;
  std::string planner = "disf";
  ConfigFlags config;
  CmaFlags cma;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::string format = "json";
};

inline int cmd_plan(const PlanOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opt.format != "json" && opt.format != "csv")
      throw InvalidInput("unknown format '" + opt.format + "'");
    const SceneSpec scene = resolve_scene(opt.scene);
    const PlannerConfig cfg = config_for(scene, opt.config.apply({}));
    const CmaEsConfig cma = opt.cma.apply({}, opt.seed);
    const Problem problem = make_problem(scene, opt.config.gripper_model());
    log_info("planning '" + scene.name + "' with " + opt.planner + " (" +
             std::to_string(problem.object.size()) + " object points)");

    const GraspPlan plan = run_planner(opt.planner, problem, cfg, cma);
    log_info(opt.planner + " finished after " + std::to_string(plan.iterations) +
             " iterations, E_geom " + std::to_string(plan.final_quality().e_geom));

    emit(opt.out, out, [&](std::ostream& o) {
      if (opt.format == "csv") {
        write_trace_csv(o, plan.trace);
        return;
      }
      json j = to_json(plan);
      j["scene"] = scene.name;
      j["object_points"] = problem.object.size();
      j["config"] = to_json(cfg);
      if (opt.planner == "cmaes")
        j["cmaes"] = {{"population", cma.population},
                      {"generations", cma.generations},
                      {"sigma0", cma.sigma0},
                      {"seed", cma.seed}};
      o << j.dump(2) << '\n';
    });
  });
}

// ---------------------------------------------------------------------------
// eval

struct EvalOptions {
  std::string plan;
  std::string scene;
  ConfigFlags config;
  std::optional<std::string> out;
  std::string format = "json";
};

inline int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opt.format != "json" && opt.format != "csv")
      throw InvalidInput("unknown format '" + opt.format + "'");
    const json pj = read_json_file(opt.plan);
    const GraspPlan plan = plan_from_json(pj);
    const SceneSpec scene = resolve_scene(opt.scene);
    const Problem problem = make_problem(scene, opt.config.gripper_model());

    if (pj.contains("object_points") &&
        pj["object_points"].get<std::size_t>() != problem.object.size())
      throw InvalidInput("plan was made for an object with " +
                         std::to_string(pj["object_points"].get<std::size_t>()) +
                         " points, scene '" + scene.name + "' has " +
                         std::to_string(problem.object.size()));
    if (!(plan.d0 + plan.dd >= problem.gripper.d_min - 1e-12 &&
          plan.d0 + plan.dd <= problem.gripper.d_max + 1e-12))
      throw InvalidInput("plan aperture lies outside the gripper range");

    PlannerConfig base;
    if (pj.contains("config")) base = planner_config_from_json(pj["config"]);
    base.d0 = plan.d0;
    PlannerConfig cfg = config_for(scene, opt.config.apply(base));
    if (pj.contains("config") && pj["config"].contains("n_app"))
      cfg.n_app = UnitVec3(vec3_from_json(pj["config"]["n_app"], "n_app"));

    const QualityReport q = evaluate_plan(problem, cfg, plan);
    emit(opt.out, out, [&](std::ostream& o) {
      if (opt.format == "csv") {
        write_trace_csv(o, {q});
        return;
      }
      json j = to_json(q);
      j["scene"] = scene.name;
      j["planner"] = plan.planner;
      if (!plan.trace.empty()) {
        const auto& tail = plan.trace.back();
        j["trace_delta"] = {{"ep", std::abs(q.ep - tail.ep)},
                            {"en", std::abs(q.en - tail.en)},
                            {"ea", std::abs(q.ea - tail.ea)},
                            {"e_geom", std::abs(q.e_geom - tail.e_geom)},
                            {"e_com", std::abs(q.e_com - tail.e_com)}};
      }
      o << j.dump(2) << '\n';
    });
  });
}

// ---------------------------------------------------------------------------
// bench

struct BenchCliOptions {
  std::vector<std::string> scenes;  // empty: default suite
  std::vector<std::string> planners{"disf", "visf", "cmaes"};
  int repetitions = 1;
  std::uint64_t seed = 1;
  int threads = 1;
  bool timing = false;
  std::optional<double> yaw, tilt, shift;
  ConfigFlags config;
  CmaFlags cma;
  std::optional<std::string> out;
  std::optional<std::string> csv_out;
  std::optional<std::string> json_out;
  std::string format = "csv";
};

inline int cmd_bench(const BenchCliOptions& opt, std::ostream& out,
                     std::ostream& err) {
  return guarded(err, [&] {
    if (opt.format != "json" && opt.format != "csv")
      throw InvalidInput("unknown format '" + opt.format + "'");
    BenchOptions b;
    if (!opt.scenes.empty()) {
      b.scenes.clear();
      for (const auto& s : opt.scenes) b.scenes.push_back(resolve_scene(s));
    }
    b.planners = opt.planners;
    b.repetitions = opt.repetitions;
    b.seed = opt.seed;
    b.threads = opt.threads;
    if (opt.yaw) b.perturb_yaw = *opt.yaw;
    if (opt.tilt) b.perturb_tilt = *opt.tilt;
    if (opt.shift) b.perturb_translation = *opt.shift;
    b.planner = opt.config.apply({});
    b.cmaes = opt.cma.apply({}, std::nullopt);
    b.gripper = opt.config.gripper_model();
    log_info("bench: " + std::to_string(b.scenes.size()) + " scenes x " +
             std::to_string(b.planners.size()) + " planners x " +
             std::to_string(b.repetitions) + " repetitions on " +
             std::to_string(b.threads) + " threads");

    const BenchReport report = run_bench(b);
    for (const auto& r : report.rows)
      if (!r.ok())
        log_warn(r.scene + "/" + r.planner + "/" + std::to_string(r.repetition) +
                 ": " + r.message);

    auto write = [&](std::ostream& o, const std::string& format) {
      if (format == "csv")
        write_bench_csv(o, report, opt.timing);
      else
        o << to_json(report).dump(2) << '\n';
    };
    if (opt.csv_out) emit(opt.csv_out, out, [&](std::ostream& o) { write(o, "csv"); });
    if (opt.json_out)
      emit(opt.json_out, out, [&](std::ostream& o) { write(o, "json"); });
    if (opt.out || (!opt.csv_out && !opt.json_out))
      emit(opt.out, out, [&](std::ostream& o) { write(o, opt.format); });
  });
}

// ---------------------------------------------------------------------------
// gen

struct GenOptions {
  std::string generator = "slab";
  std::vector<double> dimensions;  // empty: generator default
  int resolution = 0;              // 0: generator default
  std::vector<double> center;      // empty: origin
  std::optional<std::string> out;
  std::optional<std::string> scene_out;  // also write a scene JSON
  std::vector<double> n_app{0.0, 0.0, 1.0};
};

inline SyntheticObject default_object(ObjectKind kind) {
  for (const auto& s : default_suite())
    if (s.generator && s.generator->kind == kind) {
      SyntheticObject o = *s.generator;
      o.center = Vec3::Zero();
      return o;
    }
  return SyntheticObject{kind};
}

inline int cmd_gen(const GenOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    SyntheticObject spec = default_object(object_kind_from_string(opt.generator));
    if (!opt.dimensions.empty()) spec.dimensions = opt.dimensions;
    if (opt.resolution != 0) spec.resolution = opt.resolution;
    if (opt.n_app.size() != 3) throw InvalidInput("n_app needs 3 values");
    if (!opt.center.empty()) {
      if (opt.center.size() != 3) throw InvalidInput("center needs 3 values");
      spec.center = Vec3(opt.center[0], opt.center[1], opt.center[2]);
    }
    const OrientedSurface cloud = generate(spec);
    log_info("generated " + std::to_string(cloud.size()) + " points for " +
             to_string(spec.kind));
    emit(opt.out, out, [&](std::ostream& o) { write_ply(o, cloud); });

    if (opt.scene_out) {
      if (!opt.out) throw InvalidInput("--scene-out needs --out for the cloud");
      const auto scene_path = std::filesystem::absolute(*opt.scene_out);
      const auto cloud_path = std::filesystem::absolute(*opt.out);
      json j{{"name", to_string(spec.kind)},
             {"object",
              {{"file", std::filesystem::relative(cloud_path,
                                                  scene_path.parent_path())
                            .string()}}},
             {"n_app", to_json(UnitVec3(opt.n_app[0], opt.n_app[1], opt.n_app[2]).vec())}};
      std::ofstream f(scene_path);
      if (!f) throw InvalidInput("cannot write '" + scene_path.string() + "'");
      f << j.dump(2) << '\n';
    }
  });
}

}  // namespace disf::cli

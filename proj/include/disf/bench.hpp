#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <map>
#include <ostream>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "disf/baselines.hpp"
#include "disf/io.hpp"

namespace disf {

inline const std::vector<std::string>& known_planners() {
  static const std::vector<std::string> names{"disf", "visf", "visf-sequential",
                                              "cmaes"};
  return names;
}

inline GraspPlan run_planner(const std::string& name, const Problem& problem,
                             const PlannerConfig& cfg, const CmaEsConfig& cma) {
  if (name == "disf") return disf_plan(problem, cfg);
  if (name == "visf") return visf_plan(problem, cfg, VisfSolve::kJoint);
  if (name == "visf-sequential")
    return visf_plan(problem, cfg, VisfSolve::kSequential);
  if (name == "cmaes") return cmaes_plan(problem, cfg, cma);
  throw InvalidInput("unknown planner '" + name + "'");
}

struct BenchOptions {
  std::vector<SceneSpec> scenes = default_suite();
  std::vector<std::string> planners{"disf", "visf", "cmaes"};
  int repetitions = 1;
  std::uint64_t seed = 1;
  int threads = 1;
  PlannerConfig planner;
  CmaEsConfig cmaes;
  GripperModel gripper = default_parallel_gripper();
  // Repetitions after the first start from a perturbed initial pose: a yaw
  // about the scene's approach direction, an optional tilt about a random
  // axis, and a shift of up to perturb_translation per axis.
  double perturb_yaw = 0.3;           // radians, max
  double perturb_tilt = 0.0;          // radians, max
  double perturb_translation = 0.01;  // meters

  void validate() const {
    if (scenes.empty()) throw InvalidInput("bench needs at least one scene");
    if (planners.empty()) throw InvalidInput("bench needs at least one planner");
    for (const auto& p : planners)
      if (std::find(known_planners().begin(), known_planners().end(), p) ==
          known_planners().end())
        throw InvalidInput("unknown planner '" + p + "'");
    if (repetitions < 1) throw InvalidInput("repetitions must be >= 1");
    if (threads < 1) throw InvalidInput("threads must be >= 1");
    if (!(perturb_yaw >= 0.0 && perturb_tilt >= 0.0 && perturb_translation >= 0.0))
      throw InvalidInput("perturbation magnitudes must be non-negative");
    planner.validate();
    cmaes.validate();
    gripper.validate();
  }
};

struct BenchRow {
  std::string scene;
  std::string planner;
  int repetition = 0;
  std::string status = "ok";  // ok | planner-error
  std::string message;
  double e_geom = std::nan("");
  double e_com = std::nan("");
  int iterations = 0;
  bool converged = false;
  std::size_t pairs_first = 0;
  std::size_t pairs_second = 0;
  double planning_ms = 0.0;

  bool ok() const { return status == "ok"; }
};

struct PlannerSummary {
  std::size_t runs = 0;
  std::size_t failures = 0;
  double mean_e_geom = 0.0;
  double mean_e_com = 0.0;
  double mean_iterations = 0.0;
  double mean_pairs = 0.0;
  double mean_planning_ms = 0.0;
  double median_planning_ms = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::uint64_t seed = 0;

  // Means over successful rows, keyed by planner name.
  std::map<std::string, PlannerSummary> summary() const {
    std::map<std::string, PlannerSummary> out;
    std::map<std::string, std::vector<double>> times;
    for (const auto& r : rows) {
      auto& s = out[r.planner];
      ++s.runs;
      if (!r.ok()) {
        ++s.failures;
        continue;
      }
      s.mean_e_geom += r.e_geom;
      s.mean_e_com += r.e_com;
      s.mean_iterations += r.iterations;
      s.mean_pairs += static_cast<double>(r.pairs_first + r.pairs_second);
      s.mean_planning_ms += r.planning_ms;
      times[r.planner].push_back(r.planning_ms);
    }
    for (auto& [name, s] : out) {
      const double n = static_cast<double>(s.runs - s.failures);
      if (n == 0) continue;
      s.mean_e_geom /= n;
      s.mean_e_com /= n;
      s.mean_iterations /= n;
      s.mean_pairs /= n;
      s.mean_planning_ms /= n;
      auto& t = times[name];
      std::sort(t.begin(), t.end());
      const std::size_t m = t.size() / 2;
      s.median_planning_ms = t.size() % 2 ? t[m] : 0.5 * (t[m - 1] + t[m]);
    }
    return out;
  }
};

namespace detail {

// splitmix64 finalizer; keeps per-task seeds independent of thread layout.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  std::uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace detail

// Rotates the initial gripper about its own centroid and shifts it. The
// perturbation depends only on (seed, scene index, repetition).
inline InitialPose perturbed_pose(const Problem& problem, const UnitVec3& n_app,
                                  const BenchOptions& opt,
                                  std::size_t scene_index, int repetition) {
  if (repetition == 0) return problem.initial;
  std::mt19937_64 rng(detail::mix_seed(detail::mix_seed(opt.seed, scene_index),
                                       static_cast<std::uint64_t>(repetition)));
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  const double yaw = opt.perturb_yaw * unit(rng);
  Vec3 axis;
  do {
    axis = Vec3(unit(rng), unit(rng), unit(rng));
  } while (axis.norm() < 1e-3 || axis.norm() > 1.0);
  const double tilt = opt.perturb_tilt * 0.5 * (unit(rng) + 1.0);
  const Vec3 shift(unit(rng), unit(rng), unit(rng));

  const Mat3 r = rodrigues(tilt * axis.normalized()) * rodrigues(yaw * n_app.vec());
  const Vec3 pivot = problem.initial.rotation *
                         combined_centroid(problem.gripper.fingers) +
                     problem.initial.translation;
  InitialPose p;
  p.rotation = r * problem.initial.rotation;
  p.translation = r * (problem.initial.translation - pivot) + pivot +
                  opt.perturb_translation * shift;
  return p;
}

inline BenchReport run_bench(const BenchOptions& opt) {
  opt.validate();
  std::vector<Problem> problems;
  problems.reserve(opt.scenes.size());
  for (const auto& s : opt.scenes) problems.push_back(make_problem(s, opt.gripper));

  struct Task {
    std::size_t scene;
    int repetition;
    std::size_t planner;
  };
  std::vector<Task> tasks;
  for (std::size_t s = 0; s < opt.scenes.size(); ++s)
    for (int r = 0; r < opt.repetitions; ++r)
      for (std::size_t p = 0; p < opt.planners.size(); ++p)
        tasks.push_back({s, r, p});

  BenchReport report;
  report.seed = opt.seed;
  report.rows.resize(tasks.size());

  auto run_task = [&](std::size_t k) {
    const Task& task = tasks[k];
    BenchRow& row = report.rows[k];
    row.scene = opt.scenes[task.scene].name;
    row.planner = opt.planners[task.planner];
    row.repetition = task.repetition;

    Problem problem = problems[task.scene];
    problem.initial = perturbed_pose(problem, opt.scenes[task.scene].n_app, opt,
                                     task.scene, task.repetition);
    CmaEsConfig cma = opt.cmaes;
    cma.seed = detail::mix_seed(
        detail::mix_seed(detail::mix_seed(opt.seed, opt.cmaes.seed), task.scene),
        static_cast<std::uint64_t>(task.repetition));
    try {
      const GraspPlan plan = run_planner(
          row.planner, problem, config_for(opt.scenes[task.scene], opt.planner), cma);
      const auto& q = plan.final_quality();
      row.e_geom = q.e_geom;
      row.e_com = q.e_com;
      row.iterations = plan.iterations;
      row.converged = plan.converged;
      row.pairs_first = plan.pairs_first;
      row.pairs_second = plan.pairs_second;
      row.planning_ms = plan.planning_ms;
    } catch (const PlannerError& err) {
      row.status = "planner-error";
      row.message = err.what();
    }
  };

  const int workers =
      std::min<int>(opt.threads, static_cast<int>(tasks.size()));
  if (workers <= 1) {
    for (std::size_t k = 0; k < tasks.size(); ++k) run_task(k);
    return report;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t k; (k = next.fetch_add(1)) < tasks.size();) {
        try {
          run_task(k);
        } catch (...) {
          if (!failed.exchange(true)) failure = std::current_exception();
        }
      }
    });
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
  return report;
}

// Fixed CSV schema. planning_ms is appended only when requested, since wall
// time differs between runs.
inline void write_bench_csv(std::ostream& out, const BenchReport& report,
                            bool with_timing = false) {
  out << "scene,planner,repetition,status,e_geom,e_com,iterations,converged,"
         "pairs_first,pairs_second,pairs_total";
  if (with_timing) out << ",planning_ms";
  out << '\n';
  char buf[64];
  auto num = [&](double v) -> std::string {
    if (std::isnan(v)) return "nan";
    std::snprintf(buf, sizeof buf, "%.10e", v);
    return buf;
  };
  for (const auto& r : report.rows) {
    out << r.scene << ',' << r.planner << ',' << r.repetition << ',' << r.status
        << ',' << num(r.e_geom) << ',' << num(r.e_com) << ',' << r.iterations
        << ',' << (r.converged ? 1 : 0) << ',' << r.pairs_first << ','
        << r.pairs_second << ',' << (r.pairs_first + r.pairs_second);
    if (with_timing) {
      std::snprintf(buf, sizeof buf, "%.4f", r.planning_ms);
      out << ',' << buf;
    }
    out << '\n';
  }
}

inline json to_json(const BenchReport& report) {
  auto finite_or_null = [](double v) -> json {
    return std::isfinite(v) ? json(v) : json(nullptr);
  };
  json rows = json::array();
  for (const auto& r : report.rows) {
    json j{{"scene", r.scene},
           {"planner", r.planner},
           {"repetition", r.repetition},
           {"status", r.status},
           {"e_geom", finite_or_null(r.e_geom)},
           {"e_com", finite_or_null(r.e_com)},
           {"iterations", r.iterations},
           {"converged", r.converged},
           {"pairs", {{"first", r.pairs_first},
                      {"second", r.pairs_second},
                      {"total", r.pairs_first + r.pairs_second}}},
           {"planning_ms", r.planning_ms}};
    if (!r.ok()) j["message"] = r.message;
    rows.push_back(std::move(j));
  }
  json summary = json::object();
  for (const auto& [name, s] : report.summary())
    summary[name] = {{"runs", s.runs},
                     {"failures", s.failures},
                     {"mean_e_geom", s.mean_e_geom},
                     {"mean_e_com", s.mean_e_com},
                     {"mean_iterations", s.mean_iterations},
                     {"mean_pairs", s.mean_pairs},
                     {"mean_planning_ms", s.mean_planning_ms},
                     {"median_planning_ms", s.median_planning_ms}};
  return {{"seed", report.seed}, {"rows", rows}, {"summary", summary}};
}

}  // namespace disf

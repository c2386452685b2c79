#include <iostream>

#include "CLI11.hpp"
#include "disf/cli.hpp"

namespace {

void add_config_flags(CLI::App* app, disf::cli::ConfigFlags& c) {
  app->add_option("--alpha", c.alpha, "surface vs normal weight (default 0.1)");
  app->add_option("--beta", c.beta, "normal vs approach weight (default 0.8)");
  app->add_option("--d0", c.d0, "initial aperture in meters (default 0.091)");
  app->add_option("--dmin", c.dmin, "minimum aperture (default 0.011)");
  app->add_option("--dmax", c.dmax, "maximum aperture (default 0.091)");
  app->add_option("--delta-e", c.delta_e, "termination threshold (default 1e-4)");
  app->add_option("--max-iters", c.max_iters, "iteration cap (default 50)");
  app->add_option("--max-normal-angle", c.max_normal_angle_deg,
                  "correspondence normal filter in degrees (default 60)");
  app->add_option("--gripper", c.gripper, "gripper config JSON");
}

void add_cma_flags(CLI::App* app, disf::cli::CmaFlags& c) {
  app->add_option("--population", c.population, "CMA-ES population (default 16)");
  app->add_option("--generations", c.generations, "CMA-ES generations (default 200)");
  app->add_option("--sigma0", c.sigma0, "CMA-ES initial step size (default 0.05)");
}

const std::vector<std::string> kFormats{"json", "csv"};

}  // namespace

int main(int argc, char** argv) {
  using namespace disf::cli;
  CLI::App app{"Grasp planning by disentangled iterative surface fitting"};
  app.require_subcommand(1);

  PlanOptions plan;
  auto* plan_cmd = app.add_subcommand("plan", "plan a grasp for one scene");
  plan_cmd->add_option("--scene", plan.scene, "scene JSON or built-in scene name")
      ->required();
  plan_cmd->add_option("--planner", plan.planner, "disf, visf, visf-sequential or cmaes")
      ->check(CLI::IsMember(disf::known_planners()));
  plan_cmd->add_option("--seed", plan.seed, "CMA-ES seed");
  plan_cmd->add_option("--out", plan.out, "output file (default stdout)");
  plan_cmd->add_option("--format", plan.format, "json or csv (iteration trace)")
      ->check(CLI::IsMember(kFormats));
  add_config_flags(plan_cmd, plan.config);
  add_cma_flags(plan_cmd, plan.cma);

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "score a plan against a scene");
  eval_cmd->add_option("--plan", eval.plan, "plan JSON written by 'plan'")->required();
  eval_cmd->add_option("--scene", eval.scene, "scene JSON or built-in scene name")
      ->required();
  eval_cmd->add_option("--out", eval.out, "output file (default stdout)");
  eval_cmd->add_option("--format", eval.format, "json or csv")
      ->check(CLI::IsMember(kFormats));
  add_config_flags(eval_cmd, eval.config);

  BenchCliOptions bench;
  std::string scenes, planners = "disf,visf,cmaes";
  auto* bench_cmd = app.add_subcommand("bench", "run planners over a scene suite");
  bench_cmd->add_option("--scene", scenes,
                        "comma-separated scenes (default: built-in suite)");
  bench_cmd->add_option("--planner", planners, "comma-separated planners");
  bench_cmd->add_option("--reps", bench.repetitions, "repetitions per scene");
  bench_cmd->add_option("--seed", bench.seed, "seed for perturbations and CMA-ES");
  bench_cmd->add_option("--threads", bench.threads, "worker threads");
  bench_cmd->add_flag("--timing", bench.timing, "add planning_ms to the CSV");
  bench_cmd->add_option("--yaw", bench.yaw, "max yaw perturbation about n_app (rad)");
  bench_cmd->add_option("--tilt", bench.tilt, "max tilt perturbation (rad)");
  bench_cmd->add_option("--shift", bench.shift, "max translation perturbation (m)");
  bench_cmd->add_option("--out", bench.out, "output file (default stdout)");
  bench_cmd->add_option("--csv", bench.csv_out, "also write CSV here");
  bench_cmd->add_option("--json", bench.json_out, "also write JSON here");
  bench_cmd->add_option("--format", bench.format, "json or csv")
      ->check(CLI::IsMember(kFormats));
  add_config_flags(bench_cmd, bench.config);
  add_cma_flags(bench_cmd, bench.cma);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "write a synthetic object as PLY");
  gen_cmd->add_option("--generator", gen.generator,
                      "slab, box, cylinder, sphere, plate or offset-composite");
  gen_cmd->add_option("--dims", gen.dimensions, "dimensions in meters")->delimiter(',');
  gen_cmd->add_option("--resolution", gen.resolution, "samples per edge or circumference");
  gen_cmd->add_option("--center", gen.center, "x,y,z")->delimiter(',');
  gen_cmd->add_option("--n-app", gen.n_app, "approach direction for --scene-out")
      ->delimiter(',');
  gen_cmd->add_option("--out", gen.out, "PLY file (default stdout)");
  gen_cmd->add_option("--scene-out", gen.scene_out, "also write a scene JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (*plan_cmd) return cmd_plan(plan, std::cout, std::cerr);
  if (*eval_cmd) return cmd_eval(eval, std::cout, std::cerr);
  if (*bench_cmd) {
    if (!scenes.empty()) bench.scenes = split_list(scenes);
    bench.planners = split_list(planners);
    return cmd_bench(bench, std::cout, std::cerr);
  }
  if (*gen_cmd) return cmd_gen(gen, std::cout, std::cerr);
  return kUsage;
}

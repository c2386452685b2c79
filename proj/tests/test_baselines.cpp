#include <gtest/gtest.h>

#include <numbers>

#include "support.hpp"

using namespace disf;
using namespace disf::testing;

namespace {

Problem mirrored_problem() {
  Problem p;
  p.gripper = default_parallel_gripper();
  p.object = mirror_of(p.gripper.fingers);
  return p;
}

Problem slab_problem() {
  return make_problem(slab_scene(), default_parallel_gripper());
}

}  // namespace

// ---------------------------------------------------------------------------
// VISF

TEST(Visf, MirroredObjectIsAFixedPoint) {
  const auto plan = visf_plan(mirrored_problem(), PlannerConfig{});
  EXPECT_EQ(plan.planner, "visf");
  EXPECT_LT((plan.rotation - Mat3::Identity()).norm(), 1e-12);
  EXPECT_LT(plan.translation.norm(), 1e-12);
  EXPECT_LT(plan.final_quality().e_geom, 1e-10);
}

TEST(Visf, SystemRowsFollowPointToPlaneAndScaledNormalForms) {
  std::mt19937_64 rng(71);
  const auto corr = random_pairs(rng, 4);
  const auto sys = build_visf_system(corr, 0.1);
  ASSERT_EQ(sys.a.rows(), 8);
  ASSERT_EQ(sys.a.cols(), 6);
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& pr = corr.pairs[i];
    const Vec3 p = pr.finger_point.point, q = pr.object_point.point;
    const Vec3 nq = pr.object_point.normal.vec(), np = pr.finger_point.normal.vec();
    Eigen::Matrix<double, 1, 6> row;
    row << cross_componentwise(p, nq).transpose(), nq.transpose();
    EXPECT_LT((sys.a.row(i) - row).norm(), 1e-15);
    EXPECT_NEAR(sys.b(i), -(p - q).dot(nq), 1e-15);
    row << 0.1 * cross_componentwise(np, nq).transpose(), 0, 0, 0;
    EXPECT_LT((sys.a.row(4 + i) - row).norm(), 1e-15);
    EXPECT_NEAR(sys.b(4 + i), -0.1 * (np.dot(nq) + 1.0), 1e-15);
  }
}

TEST(Visf, JointSolveMatchesExplicitInverse) {
  std::mt19937_64 rng(72);
  for (int trial = 0; trial < 20; ++trial) {
    const auto corr = random_pairs(rng, 10);
    const auto sys = build_visf_system(corr, 0.1);
    const Eigen::MatrixXd gram = sys.a.transpose() * sys.a;
    const Eigen::Matrix<double, 6, 6> inv = Eigen::Matrix<double, 6, 6>(gram).inverse();
    const Eigen::VectorXd oracle = inv * (sys.a.transpose() * sys.b);
    const Eigen::VectorXd x = solve_normal_equations(sys, 0.0);
    EXPECT_LT((x - oracle).norm(), 1e-6 * std::max(1.0, oracle.norm()));
    const Eigen::VectorXd damped = solve_normal_equations(sys);
    EXPECT_LT(sys.residual_norm(damped) - sys.residual_norm(qr_solve(sys.a, sys.b)),
              1e-6 * std::max(1.0, sys.b.norm()));
  }
}

TEST(Visf, LeavesCentroidOffsetOnOffCentreSlab) {
  const auto p = slab_problem();
  const auto disf = disf_plan(p, PlannerConfig{});
  const auto visf = visf_plan(p, PlannerConfig{});
  EXPECT_GT(visf.final_quality().e_com, disf.final_quality().e_com);
}

TEST(Visf, SequentialDiagnosticModeRuns) {
  const auto p = slab_problem();
  const auto plan = visf_plan(p, PlannerConfig{}, VisfSolve::kSequential);
  EXPECT_EQ(plan.planner, "visf-sequential");
  EXPECT_GE(plan.iterations, 1);
  EXPECT_LE(plan.iterations, 50);
  EXPECT_TRUE(is_rotation(plan.rotation, 1e-9));
  EXPECT_TRUE(std::isfinite(plan.final_quality().e_geom));
}

TEST(Visf, ApertureStaysWithinLimits) {
  const auto p = slab_problem();
  const auto plan = visf_plan(p, PlannerConfig{});
  EXPECT_GE(plan.d_final, 0.011 - 1e-15);
  EXPECT_LE(plan.d_final, 0.091 + 1e-15);
  EXPECT_NEAR(plan.d0 + plan.dd, plan.d_final, 1e-12);
}

// ---------------------------------------------------------------------------
// CMA-ES core

TEST(CmaEs, FindsSphereMinimumInSevenDimensions) {
  Eigen::VectorXd target(7);
  target << 0.3, -0.2, 0.1, 0.05, -0.04, 0.02, -0.01;
  CmaEsOptions opt;
  opt.seed = 7;
  const auto res = cmaes_minimize(
      [&](const Eigen::VectorXd& x) { return (x - target).squaredNorm(); },
      Eigen::VectorXd::Zero(7), opt);
  EXPECT_LT((res.best - target).norm(), 1e-3);
  EXPECT_EQ(res.evaluations, 16 * 200);
}

TEST(CmaEs, SameSeedGivesBitIdenticalResult) {
  auto f = [](const Eigen::VectorXd& x) {
    return (x.array() - 0.1).square().sum() + std::sin(10 * x(0)) * 0.01;
  };
  CmaEsOptions opt;
  opt.generations = 60;
  opt.seed = 99;
  const auto a = cmaes_minimize(f, Eigen::VectorXd::Zero(5), opt);
  const auto b = cmaes_minimize(f, Eigen::VectorXd::Zero(5), opt);
  EXPECT_EQ(a.best, b.best);
  EXPECT_EQ(a.history, b.history);
  opt.seed = 100;
  const auto c = cmaes_minimize(f, Eigen::VectorXd::Zero(5), opt);
  EXPECT_NE(a.best, c.best);
}

TEST(CmaEs, BestEverFitnessNeverIncreases) {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 5; ++trial) {
    const Vec3 shift = random_vec(rng, 1.0);
    CmaEsOptions opt;
    opt.generations = 80;
    opt.seed = trial + 1;
    const auto res = cmaes_minimize(
        [&](const Eigen::VectorXd& x) {
          return std::abs(x(0) - shift(0)) + (x.tail(2) - shift.tail(2)).squaredNorm();
        },
        Eigen::VectorXd::Zero(3), opt);
    ASSERT_EQ(res.history.size(), 80u);
    for (std::size_t g = 1; g < res.history.size(); ++g)
      EXPECT_LE(res.history[g], res.history[g - 1]);
    EXPECT_EQ(res.history.back(), res.best_fitness);
  }
}

TEST(CmaEs, BoundsClipEvaluatedPoints) {
  CmaEsOptions opt;
  opt.generations = 50;
  opt.lower = Eigen::VectorXd::Constant(2, -0.5);
  opt.upper = Eigen::VectorXd::Constant(2, 0.5);
  bool outside = false;
  const auto res = cmaes_minimize(
      [&](const Eigen::VectorXd& x) {
        outside |= (x.array().abs() > 0.5).any();
        return (x - Eigen::Vector2d(2.0, -2.0)).squaredNorm();
      },
      Eigen::VectorXd::Zero(2), opt);
  EXPECT_FALSE(outside);
  EXPECT_NEAR(res.best(0), 0.5, 1e-6);
  EXPECT_NEAR(res.best(1), -0.5, 1e-6);
}

TEST(CmaEs, NanFitnessIsTreatedAsInfinite) {
  CmaEsOptions opt;
  opt.generations = 100;
  const auto res = cmaes_minimize(
      [](const Eigen::VectorXd& x) {
        return x(0) < 0.0 ? std::nan("") : (x - Eigen::Vector2d(0.2, 0.1)).squaredNorm();
      },
      Eigen::VectorXd::Constant(2, 0.05), opt);
  EXPECT_TRUE(std::isfinite(res.best_fitness));
  EXPECT_LT((res.best - Eigen::Vector2d(0.2, 0.1)).norm(), 1e-3);
}

TEST(CmaEs, RejectsBadOptions) {
  CmaEsOptions opt;
  opt.population = 3;
  auto f = [](const Eigen::VectorXd& x) { return x.squaredNorm(); };
  EXPECT_THROW(cmaes_minimize(f, Eigen::VectorXd::Zero(2), opt), InvalidInput);
  opt = {};
  opt.lower = Eigen::VectorXd::Zero(3);
  opt.upper = Eigen::VectorXd::Ones(3);
  EXPECT_THROW(cmaes_minimize(f, Eigen::VectorXd::Zero(2), opt), InvalidInput);
  EXPECT_THROW(cmaes_minimize(f, Eigen::VectorXd(), CmaEsOptions{}), InvalidInput);
  CmaEsConfig cfg;
  cfg.sigma0 = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidInput);
}

// ---------------------------------------------------------------------------
// CMA-ES pose search

TEST(CmaEsPlan, DeterministicForFixedSeed) {
  const auto p = slab_problem();
  CmaEsConfig cma;
  cma.generations = 40;
  cma.seed = 5;
  const auto a = cmaes_plan(p, PlannerConfig{}, cma);
  const auto b = cmaes_plan(p, PlannerConfig{}, cma);
  EXPECT_EQ(a.rotation, b.rotation);
  EXPECT_EQ(a.translation, b.translation);
  EXPECT_EQ(a.dd, b.dd);
  EXPECT_EQ(a.final_quality().e_geom, b.final_quality().e_geom);
}

TEST(CmaEsPlan, TraceBestFitnessNeverIncreases) {
  const auto p = slab_problem();
  CmaEsConfig cma;
  cma.generations = 60;
  const auto plan = cmaes_plan(p, PlannerConfig{}, cma);
  ASSERT_EQ(plan.trace.size(), 61u);
  for (std::size_t g = 2; g < plan.trace.size(); ++g)
    EXPECT_LE(plan.trace[g].e_geom, plan.trace[g - 1].e_geom);
  EXPECT_EQ(plan.iterations, 60);
}

TEST(CmaEsPlan, ReplayedPlanScoresLikeItsTrace) {
  const auto p = slab_problem();
  CmaEsConfig cma;
  cma.generations = 40;
  const auto plan = cmaes_plan(p, PlannerConfig{}, cma);
  const auto q = evaluate_plan(p, PlannerConfig{}, plan);
  EXPECT_NEAR(q.e_geom, plan.final_quality().e_geom, 1e-10);
  EXPECT_NEAR(q.e_com, plan.final_quality().e_com, 1e-10);
}

TEST(CmaEsPlan, ApertureRespectsLimits) {
  const auto p = slab_problem();
  CmaEsConfig cma;
  cma.generations = 30;
  const auto plan = cmaes_plan(p, PlannerConfig{}, cma);
  EXPECT_GE(plan.d_final, 0.011);
  EXPECT_LE(plan.d_final, 0.091);
  EXPECT_TRUE(is_rotation(plan.rotation, 1e-9));
}

TEST(CmaEsPlan, SlabQualityComparableToDisfButMuchSlower) {
  // DISF lands on the slab faces to rounding error, so "within 2x of DISF"
  // is read with an absolute floor of 1e-8.
  const auto p = slab_problem();
  const auto disf = disf_plan(p, PlannerConfig{});
  CmaEsConfig cma;
  cma.seed = 1;
  const auto cmaes = cmaes_plan(p, PlannerConfig{}, cma);
  EXPECT_LE(cmaes.final_quality().e_geom,
            std::max(2.0 * disf.final_quality().e_geom, 1e-8));
  EXPECT_GE(cmaes.planning_ms, 10.0 * disf.planning_ms);
}

#pragma once

#include <chrono>
#include <numbers>

#include "disf/cmaes.hpp"
#include "disf/solvers.hpp"

namespace disf {

// ---------------------------------------------------------------------------
// VISF: joint Gauss-Newton over (omega, t) on the linearized Ep + alpha^2 En,
// followed by the same aperture stage as DISF. No centroid alignment.

enum class VisfSolve {
  kJoint,       // one 6-d solve per iteration
  kSequential,  // omega first, then t (diagnostic)
};

// Rows [p x n^q, n^q | -(p - q).n^q] per pair, then
// [alpha (n^p x n^q), 0 | -alpha (n^p.n^q + 1)] per pair.
inline LeastSquaresSystem build_visf_system(const CorrespondenceSet& corr,
                                            double alpha) {
  const auto n = static_cast<Eigen::Index>(corr.size());
  LeastSquaresSystem sys(2 * n, 6);
  Eigen::Index row = 0;
  for (const auto& pair : corr) {
    const Vec3& p = pair.finger_point.point;
    const Vec3& q = pair.object_point.point;
    const Vec3& nq = pair.object_point.normal.vec();
    sys.a.block<1, 3>(row, 0) = p.cross(nq).transpose();
    sys.a.block<1, 3>(row, 3) = nq.transpose();
    sys.b(row) = -(p - q).dot(nq);
    ++row;
  }
  for (const auto& pair : corr) {
    const Vec3& np = pair.finger_point.normal.vec();
    const Vec3& nq = pair.object_point.normal.vec();
    sys.a.block<1, 3>(row, 0) = alpha * np.cross(nq).transpose();
    sys.b(row) = -alpha * (np.dot(nq) + 1.0);
    ++row;
  }
  return sys;
}

inline LeastSquaresSystem column_block(const LeastSquaresSystem& sys,
                                       Eigen::Index first, Eigen::Index count) {
  LeastSquaresSystem out;
  out.a = sys.a.middleCols(first, count);
  out.b = sys.b;
  return out;
}

inline GraspPlan visf_plan(const Problem& problem, const PlannerConfig& cfg,
                           VisfSolve solve = VisfSolve::kJoint,
                           const IterationObserver& observer = {}) {
  auto step = [solve](PlanningSession& s, IterationRecord& rec) {
    const auto& c = s.config();
    auto& state = s.state();
    auto& corr = s.correspondences();
    const double alpha = c.weights.alpha;

    Vec3 omega;
    Vec3 t;
    if (solve == VisfSolve::kJoint) {
      const Eigen::VectorXd x = solve_normal_equations(
          build_visf_system(corr, alpha), c.damping, "VISF");
      omega = x.head<3>();
      t = x.tail<3>();
      state.apply(rodrigues(omega), t, 0.0);
    } else {
      omega = solve_normal_equations(
          column_block(build_visf_system(corr, alpha), 0, 3), c.damping,
          "VISF rotation");
      state.apply(rodrigues(omega), Vec3::Zero(), 0.0);
      refresh_finger_points(corr, state.fingers);
      t = solve_normal_equations(
          column_block(build_visf_system(corr, alpha), 3, 3), c.damping,
          "VISF translation");
      state.apply(Mat3::Identity(), t, 0.0);
    }
    refresh_finger_points(corr, state.fingers);
    const Mat3 r = rodrigues(omega);
    const double dd = fdo_scd_or_hold(state, corr, c.d_min, c.d_max);

    rec.omega = omega;
    rec.step_rotation = r;
    rec.step_translation = t;
    rec.step_dd = dd;
    return StepOutputs{r, t, dd};
  };
  return run_iterations(solve == VisfSolve::kJoint ? "visf" : "visf-sequential",
                        problem, cfg, step, observer);
}

// ---------------------------------------------------------------------------
// CMA-ES pose search over x = (omega, t, dd) relative to the initial pose.
// omega rotates about the initial gripper centroid; dd is clamped to the
// aperture limits before evaluation. Fitness is E_geom.

struct CmaEsConfig {
  int population = 16;
  int generations = 200;
  double sigma0 = 0.05;
  std::uint64_t seed = 1;
  double omega_bound = std::numbers::pi;
  double translation_bound = 0.1;

  void validate() const {
    if (population < 4) throw InvalidInput("CMA-ES population must be >= 4");
    if (generations < 1) throw InvalidInput("CMA-ES generations must be >= 1");
    if (!(sigma0 > 0.0)) throw InvalidInput("CMA-ES sigma0 must be positive");
    if (!(std::isfinite(omega_bound) && omega_bound > 0.0 &&
          std::isfinite(translation_bound) && translation_bound > 0.0))
      throw InvalidInput("CMA-ES search bounds must be finite and positive");
  }
};

class CmaEsPoseSearch {
 public:
  CmaEsPoseSearch(const Problem& problem, const PlannerConfig& cfg)
      : problem_(problem), cfg_(cfg) {
    cfg_.validate();
    problem_.gripper.validate();
    if (problem_.object.empty()) throw InvalidInput("object surface is empty");
    if (cfg_.mode == CorrespondenceMode::kFixed && !problem_.fixed_pairs)
      throw InvalidInput("fixed correspondence mode needs a pair list");
    if (cfg_.mode == CorrespondenceMode::kNearest)
      index_ = SpatialIndex(problem_.object);
    base_ = initial_state(problem_.gripper, problem_.initial, cfg_.d0);
    pivot_ = combined_centroid(base_.fingers);
  }

  struct Candidate {
    Mat3 rotation;
    Vec3 translation;  // applied after rotating about the world origin
    double dd;
    GripperState state;
  };

  Candidate candidate(const Eigen::VectorXd& x) const {
    Candidate c;
    c.rotation = rodrigues(x.head<3>());
    c.translation = pivot_ - c.rotation * pivot_ + x.segment<3>(3);
    c.dd = clamp_aperture_step(x(6), cfg_.d0, cfg_.d_min, cfg_.d_max);
    c.state = base_;
    for (Finger j : {Finger::kFirst, Finger::kSecond}) {
      auto& surface = c.state.fingers[finger_slot(j)];
      surface = transform_surface(surface, c.rotation, c.translation, c.dd,
                                  base_.v, j);
    }
    c.state.v = base_.v.rotated(c.rotation);
    c.state.n_z = base_.n_z.rotated(c.rotation);
    c.state.aperture = cfg_.d0 + c.dd;
    return c;
  }

  CorrespondenceSet match(const GripperState& state) const {
    if (cfg_.mode == CorrespondenceMode::kNearest)
      return match_nearest(state.fingers, problem_.object, index_,
                           cfg_.max_normal_angle);
    return load_fixed_pairs(*problem_.fixed_pairs, state.fingers,
                            problem_.object);
  }

  double fitness(const Eigen::VectorXd& x) const {
    try {
      const Candidate c = candidate(x);
      return geometric_error(match(c.state), cfg_.weights.alpha);
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  }

  QualityReport report(const GripperState& state, int iteration) const {
    return evaluate_quality(match(state), state.fingers, problem_.object,
                            state.n_z, cfg_.n_app, cfg_.weights, iteration);
  }

  Eigen::VectorXd lower(const CmaEsConfig& c) const {
    Eigen::VectorXd lo(7);
    lo << -c.omega_bound, -c.omega_bound, -c.omega_bound,
        -c.translation_bound, -c.translation_bound, -c.translation_bound,
        cfg_.d_min - cfg_.d0;
    return lo;
  }

  Eigen::VectorXd upper(const CmaEsConfig& c) const {
    Eigen::VectorXd hi(7);
    hi << c.omega_bound, c.omega_bound, c.omega_bound, c.translation_bound,
        c.translation_bound, c.translation_bound, cfg_.d_max - cfg_.d0;
    return hi;
  }

  const GripperState& base() const { return base_; }

 private:
  const Problem& problem_;
  PlannerConfig cfg_;
  SpatialIndex index_;
  GripperState base_;
  Vec3 pivot_;
};

inline GraspPlan cmaes_plan(const Problem& problem, const PlannerConfig& cfg,
                            const CmaEsConfig& cma = {}) {
  const auto start = std::chrono::steady_clock::now();
  cma.validate();
  const CmaEsPoseSearch search(problem, cfg);

  CmaEsOptions opt;
  opt.population = cma.population;
  opt.generations = cma.generations;
  opt.sigma0 = cma.sigma0;
  opt.seed = cma.seed;
  opt.lower = search.lower(cma);
  opt.upper = search.upper(cma);

  GraspPlan plan;
  plan.planner = "cmaes";
  plan.d0 = cfg.d0;
  plan.trace.push_back(search.report(search.base(), 0));

  Eigen::VectorXd last_best;
  auto on_generation = [&](int gen, const Eigen::VectorXd& best, double) {
    if (last_best.size() == 0 || best != last_best) {
      last_best = best;
      try {
        plan.trace.push_back(search.report(search.candidate(best).state, gen));
      } catch (const Error&) {
        QualityReport q = plan.trace.back();
        q.iteration = gen;
        plan.trace.push_back(q);
      }
    } else {
      QualityReport q = plan.trace.back();
      q.iteration = gen;
      plan.trace.push_back(q);
    }
  };
  const CmaEsResult res = cmaes_minimize(
      [&](const Eigen::VectorXd& x) { return search.fitness(x); },
      Eigen::VectorXd::Zero(7), opt, on_generation);

  // Best-ever samples are already clipped by the strategy.
  const auto best = search.candidate(res.best);
  plan.rotation = best.rotation * problem.initial.rotation;
  plan.translation = best.rotation * problem.initial.translation + best.translation;
  plan.dd = best.dd;
  plan.d_final = best.state.aperture;
  plan.iterations = cma.generations;
  plan.converged = true;
  const auto corr = search.match(best.state);
  plan.pairs_first = corr.count(Finger::kFirst);
  plan.pairs_second = corr.count(Finger::kSecond);
  plan.planning_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  return plan;
}

}  // namespace disf

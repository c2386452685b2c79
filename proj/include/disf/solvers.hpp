#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "disf/correspondence.hpp"
#include "disf/geometry.hpp"
#include "disf/gripper.hpp"
#include "disf/least_squares.hpp"
#include "disf/quality.hpp"

namespace disf {

struct PlannerConfig {
  QualityWeights weights;
  double d0 = 0.091;
  double d_min = 0.011;
  double d_max = 0.091;
  double delta_e = 1e-4;
  int max_iterations = 50;
  UnitVec3 n_app{0.0, 0.0, 1.0};
  CorrespondenceMode mode = CorrespondenceMode::kNearest;
  double max_normal_angle = kDefaultMaxNormalAngle;
  double damping = kDefaultDamping;

  void validate() const {
    weights.validate();
    if (!(delta_e > 0.0)) throw InvalidInput("delta_e must be positive");
    if (max_iterations < 1) throw InvalidInput("max_iterations must be >= 1");
    if (!(d_min >= 0.0 && d_min < d_max))
      throw InvalidInput("aperture limits must satisfy 0 <= d_min < d_max");
    if (!(d0 >= d_min && d0 <= d_max))
      throw InvalidInput("d0 must lie within [d_min, d_max]");
    if (!(damping >= 0.0)) throw InvalidInput("damping must be non-negative");
    if (!(max_normal_angle >= 0.0))
      throw InvalidInput("max_normal_angle must be non-negative");
  }
};

struct InitialPose {
  RotationMatrix rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
};

// Everything a planner needs besides its tuning parameters.
struct Problem {
  OrientedSurface object;
  GripperModel gripper;
  InitialPose initial;
  std::optional<FixedPairSpec> fixed_pairs;
};

struct GraspPlan {
  std::string planner = "disf";
  RotationMatrix rotation = Mat3::Identity();  // R*
  Vec3 translation = Vec3::Zero();             // t*
  double dd = 0.0;                             // dd*, relative to d0
  double d0 = 0.091;
  double d_final = 0.091;
  int iterations = 0;
  bool converged = false;
  std::vector<QualityReport> trace;  // iterations + 1 entries
  double planning_ms = 0.0;
  std::size_t pairs_first = 0;
  std::size_t pairs_second = 0;

  std::size_t pairs_total() const { return pairs_first + pairs_second; }
  const QualityReport& final_quality() const { return trace.back(); }
};

// Current gripper: transformed fingertip surfaces, pointing vector, hand
// z-axis and aperture.
struct GripperState {
  std::array<OrientedSurface, 2> fingers;
  UnitVec3 v;
  UnitVec3 n_z;
  double aperture = 0.0;

  // Applies T(., r, t, dd) to both fingers (v is the current pointing
  // vector), then rotates v and n_z by r.
  void apply(const Mat3& r, const Vec3& t, double dd) {
    for (Finger j : {Finger::kFirst, Finger::kSecond}) {
      auto& surface = fingers[finger_slot(j)];
      surface = transform_surface(surface, r, t, dd, v, j);
    }
    v = v.rotated(r);
    n_z = n_z.rotated(r);
  }
};

// Starting state: the canonical gripper posed by (R0, t0)
// and opened from its rest aperture to d0.
inline GripperState initial_state(const GripperModel& model,
                                  const InitialPose& pose, double d0) {
  GripperState s;
  const double dd0 = d0 - model.rest_aperture;
  for (Finger j : {Finger::kFirst, Finger::kSecond})
    s.fingers[finger_slot(j)] = transform_surface(
        model.finger(j), pose.rotation, pose.translation, dd0, model.v0, j);
  s.v = model.v0.rotated(pose.rotation);
  s.n_z = model.n_z0.rotated(pose.rotation);
  s.aperture = d0;
  return s;
}

// Canonical gripper transformed once by a finished plan.
inline std::array<OrientedSurface, 2> replay_fingers(const GripperModel& model,
                                                     const GraspPlan& plan) {
  const double dd = plan.d0 - model.rest_aperture + plan.dd;
  std::array<OrientedSurface, 2> out;
  for (Finger j : {Finger::kFirst, Finger::kSecond})
    out[finger_slot(j)] = transform_surface(
        model.finger(j), plan.rotation, plan.translation, dd, model.v0, j);
  return out;
}

// ---------------------------------------------------------------------------
// Pose accumulation

struct PoseAccumulator {
  RotationMatrix rotation = Mat3::Identity();  // R_sigma
  Vec3 translation = Vec3::Zero();             // t_sigma
  double dd = 0.0;                             // dd_sigma
};

struct StepOutputs {
  RotationMatrix rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();
  double dd = 0.0;
};

// Steps rotate about the world origin, so an earlier translation is carried
// along by every later rotation: t <- R_step t + t_step.
inline PoseAccumulator accumulate_pose(const PoseAccumulator& acc,
                                       const StepOutputs& step) {
  return {step.rotation * acc.rotation,
          step.rotation * acc.translation + step.translation,
          acc.dd + step.dd};
}

// R* = R_sigma R0, t* = t_sigma + R_sigma t0.
inline void finalize_plan(GraspPlan& plan, const PoseAccumulator& acc,
                          const InitialPose& initial) {
  plan.rotation = acc.rotation * initial.rotation;
  plan.translation = acc.translation + acc.rotation * initial.translation;
  plan.dd = acc.dd;
}

// ---------------------------------------------------------------------------
// RO-CNM

// Linearized E_na: one row per pair (n^p x n^q, -(n^p.n^q + 1)) plus one
// approach row beta * (n_z x n_app, -(n_z.n_app - 1)).
inline LeastSquaresSystem build_rotation_system(const CorrespondenceSet& corr,
                                                const UnitVec3& n_z,
                                                const UnitVec3& n_app,
                                                double beta) {
  const auto n = static_cast<Eigen::Index>(corr.size());
  LeastSquaresSystem sys(n + 1, 3);
  Eigen::Index row = 0;
  for (const auto& pair : corr) {
    const Vec3& np = pair.finger_point.normal.vec();
    const Vec3& nq = pair.object_point.normal.vec();
    sys.a.row(row) = np.cross(nq).transpose();
    sys.b(row) = -(np.dot(nq) + 1.0);
    ++row;
  }
  sys.a.row(row) = beta * n_z.vec().cross(n_app.vec()).transpose();
  sys.b(row) = -beta * (n_z.vec().dot(n_app.vec()) - 1.0);
  return sys;
}

struct RotationStep {
  RotationParam omega = Vec3::Zero();
  RotationMatrix rotation = Mat3::Identity();
};

// Solves the rotation system, then rotates the fingers (and hence S^f), v and
// n_z about the origin.
inline RotationStep ro_cnm(GripperState& state, CorrespondenceSet& corr,
                           const UnitVec3& n_app, double beta,
                           double damping = kDefaultDamping) {
  if (corr.empty()) throw NoCorrespondence();
  const auto sys = build_rotation_system(corr, state.n_z, n_app, beta);
  RotationStep step;
  step.omega = solve_normal_equations(sys, damping, "RO-CNM");
  step.rotation = rodrigues(step.omega);
  state.apply(step.rotation, Vec3::Zero(), 0.0);
  refresh_finger_points(corr, state.fingers);
  return step;
}

// ---------------------------------------------------------------------------
// TR-CoMA

// t_c = centroid(object) - centroid(both fingers); translates the fingers.
inline Vec3 tr_coma(GripperState& state, CorrespondenceSet& corr,
                    const OrientedSurface& object) {
  const Vec3 cq = centroid(object);
  const Vec3 cp = combined_centroid(state.fingers);
  const Vec3 tc = cq - cp;
  state.apply(Mat3::Identity(), tc, 0.0);
  refresh_finger_points(corr, state.fingers);
  return tc;
}

// ---------------------------------------------------------------------------
// FDO-SCD
//
// With R = I and t = 0 the transform moves finger j by 0.5 (-1)^j v dd, so
// each point-to-plane residual becomes b + 0.5 (-1)^j (v.n^q) dd with
// b = (p - q).n^q. Writing a = 0.5 (-1)^(j-1) v.n^q gives residual b - a dd,
// minimized by dd = sum(ab) / sum(a^2).

constexpr double kMinApertureCurvature = 1e-15;

inline double aperture_coefficient(const CorrespondencePair& pair,
                                   const UnitVec3& v) {
  return -finger_sign(pair.finger) * v.vec().dot(pair.object_point.normal.vec());
}

inline double aperture_step_unclamped(const CorrespondenceSet& corr,
                                      const UnitVec3& v) {
  double num = 0.0;
  double den = 0.0;
  for (const auto& pair : corr) {
    const double a = aperture_coefficient(pair, v);
    const double b = (pair.finger_point.point - pair.object_point.point)
                         .dot(pair.object_point.normal.vec());
    num += a * b;
    den += a * a;
  }
  if (den < kMinApertureCurvature) throw DegenerateAperture();
  return num / den;
}

inline double clamp_aperture_step(double dd_hat, double d, double d_min,
                                  double d_max) {
  if (dd_hat + d < d_min) return d_min - d;
  if (dd_hat + d > d_max) return d_max - d;
  return dd_hat;
}

// Returns dd*; the aperture is updated to d + dd* (exactly d_min or d_max
// when clamped).
inline double fdo_scd(GripperState& state, CorrespondenceSet& corr,
                      double d_min, double d_max) {
  if (corr.empty()) throw NoCorrespondence();
  const double d = state.aperture;
  const double dd_hat = aperture_step_unclamped(corr, state.v);
  const double dd = clamp_aperture_step(dd_hat, d, d_min, d_max);
  state.apply(Mat3::Identity(), Vec3::Zero(), dd);
  refresh_finger_points(corr, state.fingers);
  if (dd_hat + d < d_min)
    state.aperture = d_min;
  else if (dd_hat + d > d_max)
    state.aperture = d_max;
  else
    state.aperture = d + dd;
  return dd;
}

// ---------------------------------------------------------------------------
// Iteration driver shared by DISF and VISF

struct IterationRecord {
  int iteration = 0;
  RotationParam omega = Vec3::Zero();
  RotationMatrix step_rotation = Mat3::Identity();
  Vec3 step_translation = Vec3::Zero();
  double step_dd = 0.0;
  PoseAccumulator accumulated;
  QualityReport quality;
};

using IterationObserver = std::function<void(const IterationRecord&)>;

// Owns the per-run state: gripper, correspondences and the object index.
class PlanningSession {
 public:
  PlanningSession(const Problem& problem, const PlannerConfig& cfg)
      : problem_(problem), cfg_(cfg) {
    cfg_.validate();
    problem_.gripper.validate();
    if (problem_.object.empty()) throw InvalidInput("object surface is empty");
    if (cfg_.mode == CorrespondenceMode::kFixed && !problem_.fixed_pairs)
      throw InvalidInput("fixed correspondence mode needs a pair list");
    if (cfg_.mode == CorrespondenceMode::kNearest)
      index_ = SpatialIndex(problem_.object);
    state_ = initial_state(problem_.gripper, problem_.initial, cfg_.d0);
    rematch();
  }

  GripperState& state() { return state_; }
  CorrespondenceSet& correspondences() { return corr_; }
  const OrientedSurface& object() const { return problem_.object; }
  const PlannerConfig& config() const { return cfg_; }

  // Nearest mode matches against the current fingers; fixed mode only
  // refreshes the finger side of the listed pairs.
  void rematch() {
    if (cfg_.mode == CorrespondenceMode::kNearest) {
      corr_ = match_nearest(state_.fingers, problem_.object, index_,
                            cfg_.max_normal_angle);
    } else if (corr_.empty()) {
      corr_ = load_fixed_pairs(*problem_.fixed_pairs, state_.fingers,
                               problem_.object);
    } else {
      refresh_finger_points(corr_, state_.fingers);
    }
  }

  QualityReport report(int iteration) const {
    return evaluate_quality(corr_, state_.fingers, problem_.object,
                            state_.n_z, cfg_.n_app, cfg_.weights, iteration);
  }

 private:
  const Problem& problem_;
  PlannerConfig cfg_;
  SpatialIndex index_;
  GripperState state_;
  CorrespondenceSet corr_;
};

// Runs `step` until the loop functional E_geom changes by at most delta_e.
// `step` performs one iteration's stage updates and returns what it applied.
template <typename Step>
GraspPlan run_iterations(const std::string& name, const Problem& problem,
                         const PlannerConfig& cfg, Step&& step,
                         const IterationObserver& observer) {
  const auto start = std::chrono::steady_clock::now();
  PlanningSession session(problem, cfg);

  GraspPlan plan;
  plan.planner = name;
  plan.d0 = cfg.d0;
  plan.trace.push_back(session.report(0));
  PoseAccumulator acc;
  double e = plan.trace.back().e_geom;

  for (int k = 1; k <= cfg.max_iterations; ++k) {
    const double e_prev = e;
    IterationRecord rec;
    rec.iteration = k;
    try {
      const StepOutputs out = step(session, rec);
      acc = accumulate_pose(acc, out);
      session.rematch();
    } catch (const IterationError&) {
      throw;
    } catch (const PlannerError& err) {
      throw IterationError(k, err.what());
    }
    plan.trace.push_back(session.report(k));
    plan.iterations = k;
    e = plan.trace.back().e_geom;

    if (observer) {
      rec.accumulated = acc;
      rec.quality = plan.trace.back();
      observer(rec);
    }
    if (std::abs(e_prev - e) <= cfg.delta_e) {
      plan.converged = true;
      break;
    }
  }

  finalize_plan(plan, acc, problem.initial);
  plan.d_final = session.state().aperture;
  const auto& corr = session.correspondences();
  plan.pairs_first = corr.count(Finger::kFirst);
  plan.pairs_second = corr.count(Finger::kSecond);
  plan.planning_ms = std::chrono::duration<double, std::milli>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  return plan;
}

// Aperture stage as used inside the loop: a degenerate aperture system
// leaves the fingers where they are.
inline double fdo_scd_or_hold(GripperState& state, CorrespondenceSet& corr,
                              double d_min, double d_max) {
  try {
    return fdo_scd(state, corr, d_min, d_max);
  } catch (const DegenerateAperture&) {
    return 0.0;
  }
}

// ---------------------------------------------------------------------------
// DISF

inline GraspPlan disf_plan(const Problem& problem, const PlannerConfig& cfg,
                           const IterationObserver& observer = {}) {
  auto step = [](PlanningSession& s, IterationRecord& rec) {
    const auto& c = s.config();
    auto& state = s.state();
    auto& corr = s.correspondences();

    const RotationStep rot =
        ro_cnm(state, corr, c.n_app, c.weights.beta, c.damping);
    const Vec3 tc = tr_coma(state, corr, s.object());
    const double dd = fdo_scd_or_hold(state, corr, c.d_min, c.d_max);

    rec.omega = rot.omega;
    rec.step_rotation = rot.rotation;
    rec.step_translation = tc;
    rec.step_dd = dd;
    return StepOutputs{rot.rotation, tc, dd};
  };
  return run_iterations("disf", problem, cfg, step, observer);
}

// Scores a plan after the fact: the canonical gripper is moved once by
// (R*, t*, dd*), matched against the object, and evaluated.
inline QualityReport evaluate_plan(const Problem& problem,
                                   const PlannerConfig& cfg,
                                   const GraspPlan& plan) {
  cfg.validate();
  problem.gripper.validate();
  if (problem.object.empty()) throw InvalidInput("object surface is empty");
  if (!is_rotation(plan.rotation, 1e-8))
    throw InvalidInput("plan rotation is not a proper rotation matrix");
  const auto fingers = replay_fingers(problem.gripper, plan);
  const UnitVec3 n_z = problem.gripper.n_z0.rotated(plan.rotation);
  CorrespondenceSet corr;
  if (cfg.mode == CorrespondenceMode::kNearest) {
    corr = match_nearest(fingers, problem.object, SpatialIndex(problem.object),
                         cfg.max_normal_angle);
  } else {
    if (!problem.fixed_pairs)
      throw InvalidInput("fixed correspondence mode needs a pair list");
    corr = load_fixed_pairs(*problem.fixed_pairs, fingers, problem.object);
  }
  return evaluate_quality(corr, fingers, problem.object, n_z, cfg.n_app,
                          cfg.weights, plan.iterations);
}

}  // namespace disf

#pragma once

#include <array>
#include <span>

#include "disf/correspondence.hpp"
#include "disf/geometry.hpp"
#include "disf/gripper.hpp"

namespace disf {

struct QualityWeights {
  double alpha = 0.1;  // surface distance vs normal misalignment
  double beta = 0.8;   // normal vs approach misalignment

  void validate() const {
    if (!(alpha >= 0.0) || !(beta >= 0.0))
      throw InvalidInput("quality weights must be non-negative");
  }
};

struct QualityReport {
  double ep = 0.0;
  double en = 0.0;
  double ea = 0.0;
  double e_na = 0.0;
  double e_geom = 0.0;
  double e_com = 0.0;
  int iteration = 0;
};

// Point-to-plane distance Ep: sum of ((p' - q) . n^q)^2 where p' is the
// finger point after the gripper transform (rodrigues(omega), t, dd along v).
inline double surface_distance(const CorrespondenceSet& corr,
                               const RotationParam& omega, const Vec3& t,
                               double dd, const UnitVec3& v) {
  const Mat3 r = rodrigues(omega);
  double sum = 0.0;
  for (const auto& pair : corr) {
    const Vec3 p =
        transform_point_normal(pair.finger_point, r, t, dd, v, pair.finger)
            .point;
    const double res =
        (p - pair.object_point.point).dot(pair.object_point.normal.vec());
    sum += res * res;
  }
  return sum;
}

inline double surface_distance(const CorrespondenceSet& corr) {
  return surface_distance(corr, Vec3::Zero(), Vec3::Zero(), 0.0, UnitVec3());
}

// En: sum of ((R n^p) . n^q + 1)^2, zero when every pair is antiparallel.
inline double normal_misalignment(const CorrespondenceSet& corr,
                                  const RotationParam& omega = Vec3::Zero()) {
  const Mat3 r = rodrigues(omega);
  double sum = 0.0;
  for (const auto& pair : corr) {
    const double res =
        (r * pair.finger_point.normal.vec()).dot(pair.object_point.normal.vec()) +
        1.0;
    sum += res * res;
  }
  return sum;
}

// Ea: the approach residual (R n_z) . n_app - 1 is pair-independent; it is
// counted once per correspondence slot.
inline double approach_misalignment(const UnitVec3& n_z, const UnitVec3& n_app,
                                    const RotationParam& omega,
                                    std::size_t slots) {
  if (slots < 1) throw InvalidInput("approach misalignment needs N >= 1");
  const double res = (rodrigues(omega) * n_z.vec()).dot(n_app.vec()) - 1.0;
  return static_cast<double>(slots) * res * res;
}

inline double combined_e_na(const CorrespondenceSet& corr,
                            const RotationParam& omega, const UnitVec3& n_z,
                            const UnitVec3& n_app, double beta) {
  return normal_misalignment(corr, omega) +
         beta * beta * approach_misalignment(n_z, n_app, omega, corr.size());
}

inline double geometric_error(const CorrespondenceSet& corr,
                              const RotationParam& omega, const Vec3& t,
                              double dd, const UnitVec3& v, double alpha) {
  return surface_distance(corr, omega, t, dd, v) +
         alpha * alpha * normal_misalignment(corr, omega);
}

inline double geometric_error(const CorrespondenceSet& corr, double alpha) {
  return geometric_error(corr, Vec3::Zero(), Vec3::Zero(), 0.0, UnitVec3(),
                         alpha);
}

// E_CoM: distance between the object centroid and the centroid of both
// (already transformed) finger surfaces.
inline double com_error(const OrientedSurface& object,
                        std::span<const OrientedSurface> gripper) {
  return (centroid(object) - combined_centroid(gripper)).norm();
}

inline double com_error(const OrientedSurface& object,
                        const OrientedSurface& gripper) {
  return (centroid(object) - centroid(gripper)).norm();
}

// Full report for the current state, i.e. at zero increment.
inline QualityReport evaluate_quality(
    const CorrespondenceSet& corr,
    const std::array<OrientedSurface, 2>& fingers,
    const OrientedSurface& object, const UnitVec3& n_z, const UnitVec3& n_app,
    const QualityWeights& w, int iteration) {
  QualityReport q;
  q.iteration = iteration;
  q.ep = surface_distance(corr);
  q.en = normal_misalignment(corr);
  q.ea = approach_misalignment(n_z, n_app, Vec3::Zero(), corr.size());
  q.e_na = q.en + w.beta * w.beta * q.ea;
  q.e_geom = q.ep + w.alpha * w.alpha * q.en;
  q.e_com = com_error(object, fingers);
  return q;
}

}  // namespace disf

#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cmath>
#include <span>
#include <vector>

#include "disf/errors.hpp"

namespace disf {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Orthonormal 3x3 matrix with det +1. Kept as a plain Eigen matrix; see
// is_rotation() for the check.
using RotationMatrix = Eigen::Matrix3d;

// Axis-angle vector (radians * axis).
using RotationParam = Eigen::Vector3d;

constexpr double kUnitTolerance = 1e-9;
constexpr double kZeroNormTolerance = 1e-12;
constexpr double kIdentityAngle = 1e-12;

// Direction vector held at unit length. Inputs within 1e-9 of unit norm are
// kept verbatim, others are renormalized; near-zero vectors are rejected.
class UnitVec3 {
 public:
  UnitVec3() : v_(Vec3::UnitX()) {}

  explicit UnitVec3(const Vec3& v) : v_(v) {
    if (!v.allFinite()) throw InvalidInput("unit vector is not finite");
    const double n = v.norm();
    if (n < kZeroNormTolerance) throw InvalidInput("unit vector has zero norm");
    if (std::abs(n - 1.0) > kUnitTolerance) v_ /= n;
  }

  UnitVec3(double x, double y, double z) : UnitVec3(Vec3(x, y, z)) {}

  const Vec3& vec() const { return v_; }
  operator const Vec3&() const { return v_; }
  double operator[](int i) const { return v_[i]; }
  UnitVec3 operator-() const { return UnitVec3(-v_); }

  // Applies a rotation and renormalizes.
  UnitVec3 rotated(const Mat3& r) const { return UnitVec3(r * v_); }

 private:
  Vec3 v_;
};

struct PointNormal {
  Vec3 point = Vec3::Zero();
  UnitVec3 normal;
};

// Ordered point/normal cloud: a canonical or transformed surface.
using OrientedSurface = std::vector<PointNormal>;

// Cross-product matrix: skew(w) * x == w.cross(x).
inline Mat3 skew(const RotationParam& w) {
  Mat3 m;
  // clang-format off
  m <<  0.0,  -w.z(),  w.y(),
        w.z(),  0.0,  -w.x(),
       -w.y(),  w.x(),  0.0;
  // clang-format on
  return m;
}

// Rodrigues' formula: I + sin(theta)[u]x + (1 - cos(theta))[u]x^2.
inline RotationMatrix rodrigues(const RotationParam& w) {
  const double theta = w.norm();
  if (theta < kIdentityAngle) return Mat3::Identity();
  const Mat3 k = skew(w / theta);
  return Mat3::Identity() + std::sin(theta) * k +
         (1.0 - std::cos(theta)) * (k * k);
}

// First-order rotation I + [w]x. Not orthonormal for w != 0.
inline Mat3 small_rotation(const RotationParam& w) {
  return Mat3::Identity() + skew(w);
}

inline bool is_rotation(const Mat3& r, double tol = 1e-9) {
  if (!r.allFinite()) return false;
  const double ortho = (r.transpose() * r - Mat3::Identity()).norm();
  return ortho < tol && std::abs(r.determinant() - 1.0) < tol;
}

inline Vec3 centroid(std::span<const PointNormal> surface) {
  if (surface.empty()) throw InvalidInput("centroid of an empty surface");
  Vec3 sum = Vec3::Zero();
  for (const auto& pn : surface) sum += pn.point;
  return sum / static_cast<double>(surface.size());
}

// Centroid of several surfaces treated as one concatenated cloud.
inline Vec3 combined_centroid(std::span<const OrientedSurface> surfaces) {
  Vec3 sum = Vec3::Zero();
  std::size_t count = 0;
  for (const auto& s : surfaces) {
    for (const auto& pn : s) sum += pn.point;
    count += s.size();
  }
  if (count == 0) throw InvalidInput("centroid of an empty surface");
  return sum / static_cast<double>(count);
}

// Rigid transform x -> r * x + t applied to points and normals.
inline OrientedSurface rigid_transform(std::span<const PointNormal> surface,
                                       const Mat3& r, const Vec3& t) {
  OrientedSurface out;
  out.reserve(surface.size());
  for (const auto& pn : surface)
    out.push_back({r * pn.point + t, pn.normal.rotated(r)});
  return out;
}

}  // namespace disf

#pragma once

#include <array>
#include <cmath>

#include "disf/geometry.hpp"

namespace disf {

// Finger index j in {1, 2}. Finger 1 sits at -v/2, finger 2 at +v/2.
enum class Finger : int { kFirst = 1, kSecond = 2 };

inline int finger_slot(Finger j) { return static_cast<int>(j) - 1; }
inline Finger finger_from_index(int j) {
  if (j != 1 && j != 2) throw InvalidInput("finger index must be 1 or 2");
  return static_cast<Finger>(j);
}

// 0.5 * (-1)^j: the signed half-displacement of finger j per unit aperture
// change along v.
inline double finger_sign(Finger j) {
  return j == Finger::kFirst ? -0.5 : 0.5;
}

struct GripperModel {
  // Canonical fingertip surfaces, posed at `rest_aperture` along v0.
  std::array<OrientedSurface, 2> fingers;
  double rest_aperture = 0.091;
  double d_min = 0.011;
  double d_max = 0.091;
  UnitVec3 v0{0.0, 1.0, 0.0};
  UnitVec3 n_z0{0.0, 0.0, 1.0};

  const OrientedSurface& finger(Finger j) const {
    return fingers[finger_slot(j)];
  }

  void validate() const {
    if (!(d_min >= 0.0 && d_min < d_max))
      throw InvalidInput("gripper limits must satisfy 0 <= d_min < d_max");
    if (fingers[0].empty() || fingers[1].empty())
      throw InvalidInput("gripper finger surfaces must be non-empty");
    if (std::abs(v0.vec().dot(n_z0.vec())) > 1e-6)
      throw InvalidInput("v0 and n_z0 must be orthogonal");
  }
};

// Gripper transformation for one point/normal of finger j:
//   p -> R p + t + 0.5 (-1)^j R v dd,   n -> R n.
inline PointNormal transform_point_normal(const PointNormal& pn, const Mat3& r,
                                          const Vec3& t, double dd,
                                          const UnitVec3& v, Finger j) {
  return {r * (pn.point + finger_sign(j) * dd * v.vec()) + t,
          pn.normal.rotated(r)};
}

inline OrientedSurface transform_surface(const OrientedSurface& surface,
                                         const Mat3& r, const Vec3& t,
                                         double dd, const UnitVec3& v,
                                         Finger j) {
  OrientedSurface out;
  out.reserve(surface.size());
  for (const auto& pn : surface)
    out.push_back(transform_point_normal(pn, r, t, dd, v, j));
  return out;
}

struct PadConfig {
  double width = 0.02;   // along n_z0 x v0
  double height = 0.02;  // along n_z0
  int columns = 5;
  int rows = 5;
  double rest_aperture = 0.091;
  double d_min = 0.011;
  double d_max = 0.091;
  UnitVec3 v0{0.0, 1.0, 0.0};
  UnitVec3 n_z0{0.0, 0.0, 1.0};
};

// Two flat rectangular pads facing each other along v0, `rest_aperture`
// apart, centred on the origin. Finger 1 normals are +v0, finger 2 -v0.
inline GripperModel default_parallel_gripper(const PadConfig& cfg = {}) {
  if (!(cfg.width > 0.0 && cfg.height > 0.0))
    throw InvalidInput("pad dimensions must be positive");
  if (cfg.columns < 1 || cfg.rows < 1)
    throw InvalidInput("pad resolution must be at least 1x1");

  const Vec3 v = cfg.v0.vec();
  const Vec3 up = cfg.n_z0.vec();
  const Vec3 across = up.cross(v).normalized();

  auto grid = [](int n, double extent, int k) {
    return n == 1 ? 0.0 : -0.5 * extent + extent * k / (n - 1);
  };

  GripperModel model;
  model.rest_aperture = cfg.rest_aperture;
  model.d_min = cfg.d_min;
  model.d_max = cfg.d_max;
  model.v0 = cfg.v0;
  model.n_z0 = cfg.n_z0;
  for (Finger j : {Finger::kFirst, Finger::kSecond}) {
    auto& pad = model.fingers[finger_slot(j)];
    const Vec3 center = finger_sign(j) * cfg.rest_aperture * v;
    const UnitVec3 normal(j == Finger::kFirst ? v : Vec3(-v));
    for (int r = 0; r < cfg.rows; ++r)
      for (int c = 0; c < cfg.columns; ++c)
        pad.push_back({center + grid(cfg.columns, cfg.width, c) * across +
                           grid(cfg.rows, cfg.height, r) * up,
                       normal});
  }
  model.validate();
  return model;
}

}  // namespace disf

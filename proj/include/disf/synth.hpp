#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "disf/geometry.hpp"

namespace disf {

enum class ObjectKind { kSlab, kBox, kCylinder, kSphere, kPlate, kOffsetComposite };

inline std::string to_string(ObjectKind k) {
  switch (k) {
    case ObjectKind::kSlab: return "slab";
    case ObjectKind::kBox: return "box";
    case ObjectKind::kCylinder: return "cylinder";
    case ObjectKind::kSphere: return "sphere";
    case ObjectKind::kPlate: return "plate";
    case ObjectKind::kOffsetComposite: return "offset-composite";
  }
  return "unknown";
}

inline ObjectKind object_kind_from_string(const std::string& s) {
  for (auto k : {ObjectKind::kSlab, ObjectKind::kBox, ObjectKind::kCylinder,
                 ObjectKind::kSphere, ObjectKind::kPlate,
                 ObjectKind::kOffsetComposite})
    if (to_string(k) == s) return k;
  throw InvalidInput("unknown object kind '" + s + "'");
}

// Parametric test object. Meaning of `dimensions` by kind:
//   slab:     (length x, width y, height z); two faces normal to y
//   box/plate:(x, y, z) extents; all six faces
//   cylinder: (radius, height); lateral surface, axis along z
//   sphere:   (radius)
//   offset-composite: (handle x, y, z, head x, y, z); the head box is
//             attached to the +x end of the handle
// `resolution` is the number of samples along the longest edge (or around
// the circumference for round kinds).
struct SyntheticObject {
  ObjectKind kind = ObjectKind::kSlab;
  std::vector<double> dimensions{0.06, 0.03, 0.06};
  int resolution = 12;
  Vec3 center = Vec3::Zero();

  std::size_t expected_dimensions() const {
    switch (kind) {
      case ObjectKind::kSlab:
      case ObjectKind::kBox:
      case ObjectKind::kPlate: return 3;
      case ObjectKind::kCylinder: return 2;
      case ObjectKind::kSphere: return 1;
      case ObjectKind::kOffsetComposite: return 6;
    }
    return 0;
  }

  void validate() const {
    if (dimensions.size() != expected_dimensions())
      throw InvalidInput(to_string(kind) + " expects " +
                         std::to_string(expected_dimensions()) +
                         " dimensions");
    for (double d : dimensions)
      if (!(std::isfinite(d) && d > 0.0))
        throw InvalidInput("object dimensions must be positive");
    if (resolution < 2) throw InvalidInput("resolution must be >= 2");
    if (!center.allFinite()) throw InvalidInput("object center is not finite");
  }
};

namespace detail {

// Cell-centred samples on a rectangle spanned by u (extent eu) and w (extent
// ew) around `origin`, with spacing close to `spacing`.
inline void sample_face(OrientedSurface& out, const Vec3& origin,
                        const Vec3& u, double eu, const Vec3& w, double ew,
                        const Vec3& normal, double spacing) {
  const int nu = std::max(1, static_cast<int>(std::lround(eu / spacing)));
  const int nw = std::max(1, static_cast<int>(std::lround(ew / spacing)));
  const UnitVec3 n(normal);
  for (int a = 0; a < nu; ++a)
    for (int b = 0; b < nw; ++b)
      out.push_back({origin + ((a + 0.5) / nu - 0.5) * eu * u +
                         ((b + 0.5) / nw - 0.5) * ew * w,
                     n});
}

inline void sample_box(OrientedSurface& out, const Vec3& c, const Vec3& ext,
                       double spacing, bool all_faces) {
  const Vec3 ex = Vec3::UnitX(), ey = Vec3::UnitY(), ez = Vec3::UnitZ();
  // +-y faces first: they carry the grasp.
  sample_face(out, c - 0.5 * ext.y() * ey, ex, ext.x(), ez, ext.z(), -ey, spacing);
  sample_face(out, c + 0.5 * ext.y() * ey, ex, ext.x(), ez, ext.z(), ey, spacing);
  if (!all_faces) return;
  sample_face(out, c - 0.5 * ext.x() * ex, ey, ext.y(), ez, ext.z(), -ex, spacing);
  sample_face(out, c + 0.5 * ext.x() * ex, ey, ext.y(), ez, ext.z(), ex, spacing);
  sample_face(out, c - 0.5 * ext.z() * ez, ex, ext.x(), ey, ext.y(), -ez, spacing);
  sample_face(out, c + 0.5 * ext.z() * ez, ex, ext.x(), ey, ext.y(), ez, spacing);
}

}  // namespace detail

inline OrientedSurface generate(const SyntheticObject& spec) {
  spec.validate();
  const auto& d = spec.dimensions;
  const Vec3& c = spec.center;
  OrientedSurface out;

  switch (spec.kind) {
    case ObjectKind::kSlab:
    case ObjectKind::kBox:
    case ObjectKind::kPlate: {
      const Vec3 ext(d[0], d[1], d[2]);
      const double spacing = ext.maxCoeff() / spec.resolution;
      detail::sample_box(out, c, ext, spacing, spec.kind != ObjectKind::kSlab);
      break;
    }
    case ObjectKind::kOffsetComposite: {
      const Vec3 handle(d[0], d[1], d[2]);
      const Vec3 head(d[3], d[4], d[5]);
      const double spacing = std::max(handle.maxCoeff(), head.maxCoeff()) /
                             spec.resolution;
      const Vec3 head_center = c + Vec3(0.5 * (handle.x() + head.x()), 0, 0);
      detail::sample_box(out, c, handle, spacing, true);
      detail::sample_box(out, head_center, head, spacing, true);
      break;
    }
    case ObjectKind::kCylinder: {
      const double r = d[0], h = d[1];
      const int around = spec.resolution;
      const double arc = 2.0 * std::numbers::pi * r / around;
      const int rings = std::max(1, static_cast<int>(std::lround(h / arc)));
      for (int k = 0; k < rings; ++k) {
        const double z = ((k + 0.5) / rings - 0.5) * h;
        for (int a = 0; a < around; ++a) {
          const double th = 2.0 * std::numbers::pi * (a + 0.5) / around;
          const Vec3 radial(std::cos(th), std::sin(th), 0.0);
          out.push_back({c + r * radial + Vec3(0, 0, z), UnitVec3(radial)});
        }
      }
      break;
    }
    case ObjectKind::kSphere: {
      const double r = d[0];
      const int rings = spec.resolution;
      for (int k = 0; k < rings; ++k) {
        const double phi = std::numbers::pi * (k + 0.5) / rings;
        const int around = std::max(
            3, static_cast<int>(std::lround(2.0 * rings * std::sin(phi))));
        for (int a = 0; a < around; ++a) {
          const double th = 2.0 * std::numbers::pi * (a + 0.5) / around;
          const Vec3 radial(std::sin(phi) * std::cos(th),
                            std::sin(phi) * std::sin(th), std::cos(phi));
          out.push_back({c + r * radial, UnitVec3(radial)});
        }
      }
      break;
    }
  }
  return out;
}

}  // namespace disf

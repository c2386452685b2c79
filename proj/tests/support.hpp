#pragma once

// Shared fixtures and independent oracles for the unit and acceptance tests.
// Nothing here calls into the code under test for the quantity it checks.

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include "disf/bench.hpp"

namespace disf::testing {

inline Vec3 random_vec(std::mt19937_64& rng, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return Vec3(u(rng), u(rng), u(rng));
}

inline UnitVec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    const Vec3 v(n(rng), n(rng), n(rng));
    if (v.norm() > 1e-3) return UnitVec3(v);
  }
}

// Axis-angle vector with norm uniform in [0, max_angle].
inline Vec3 random_omega(std::mt19937_64& rng, double max_angle) {
  std::uniform_real_distribution<double> u(0.0, max_angle);
  return u(rng) * random_unit(rng).vec();
}

inline OrientedSurface random_surface(std::mt19937_64& rng, std::size_t n,
                                      double scale = 0.1) {
  OrientedSurface s;
  for (std::size_t i = 0; i < n; ++i)
    s.push_back({random_vec(rng, scale), random_unit(rng)});
  return s;
}

// Rotation by way of a unit quaternion, independent of rodrigues().
inline Mat3 quaternion_rotation(const Vec3& omega) {
  const double theta = omega.norm();
  if (theta == 0.0) return Mat3::Identity();
  return Eigen::Quaterniond(Eigen::AngleAxisd(theta, omega / theta))
      .toRotationMatrix();
}

inline Vec3 cross_componentwise(const Vec3& a, const Vec3& b) {
  return Vec3(a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
              a[0] * b[1] - a[1] * b[0]);
}

// Kahan-compensated mean in long double.
inline Vec3 compensated_mean(const OrientedSurface& s) {
  Vec3 out;
  for (int k = 0; k < 3; ++k) {
    long double sum = 0.0L, c = 0.0L;
    for (const auto& pn : s) {
      const long double y = static_cast<long double>(pn.point[k]) - c;
      const long double t = sum + y;
      c = (t - sum) - y;
      sum = t;
    }
    out[k] = static_cast<double>(sum / static_cast<long double>(s.size()));
  }
  return out;
}

inline Vec3 naive_mean(const std::vector<OrientedSurface>& parts) {
  Vec3 sum = Vec3::Zero();
  std::size_t n = 0;
  for (const auto& s : parts)
    for (const auto& pn : s) {
      sum += pn.point;
      ++n;
    }
  return sum / static_cast<double>(n);
}

// Least-squares minimizer by column-pivoting Householder QR.
inline Eigen::VectorXd qr_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  return a.colPivHouseholderQr().solve(b);
}

// Minimizer of a unimodal f on [lo, hi] by golden-section search.
inline double golden_section(const std::function<double(double)>& f, double lo,
                             double hi, double tol = 1e-13) {
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = f(c), fd = f(d);
  while (hi - lo > tol) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

// Linear-scan nearest admissible object point; ties go to the lower index.
inline std::optional<std::size_t> scan_nearest(const PointNormal& fp,
                                               const OrientedSurface& object,
                                               double max_angle) {
  const double bound = -std::cos(max_angle);
  std::optional<std::size_t> best;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < object.size(); ++k) {
    if (fp.normal.vec().dot(object[k].normal.vec()) > bound) continue;
    const double d2 = (object[k].point - fp.point).squaredNorm();
    if (d2 < best_d2) {
      best_d2 = d2;
      best = k;
    }
  }
  return best;
}

// Point-to-plane sum recomputed from raw coordinates with a plain loop.
inline double naive_ep(const CorrespondenceSet& corr, const Mat3& r,
                       const Vec3& t, double dd, const Vec3& v) {
  double sum = 0.0;
  for (const auto& pair : corr) {
    const double s = pair.finger == Finger::kFirst ? -0.5 : 0.5;
    const Vec3 p = r * pair.finger_point.point + t + s * dd * (r * v);
    const Vec3 diff = p - pair.object_point.point;
    double dot = 0.0;
    for (int k = 0; k < 3; ++k) dot += diff[k] * pair.object_point.normal[k];
    sum += dot * dot;
  }
  return sum;
}

// Random correspondence set: finger points scattered around two opposing
// faces, object normals roughly opposing the finger normals.
inline CorrespondenceSet random_pairs(std::mt19937_64& rng, std::size_t n,
                                      const Vec3& v = Vec3::UnitY()) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CorrespondenceSet corr;
  for (std::size_t i = 0; i < n; ++i) {
    const Finger j = i % 2 == 0 ? Finger::kFirst : Finger::kSecond;
    const double side = j == Finger::kFirst ? -1.0 : 1.0;
    const Vec3 p = side * 0.04 * v + random_vec(rng, 0.01);
    const Vec3 q = side * (0.015 + 0.005 * u(rng)) * v + random_vec(rng, 0.01);
    const UnitVec3 np(-side * v + 0.2 * random_vec(rng));
    const UnitVec3 nq(side * v + 0.3 * random_vec(rng));
    corr.pairs.push_back({{p, np}, {q, nq}, j, i, i});
  }
  return corr;
}

// Mirrored object: each pad point becomes an object point in the same place
// with the opposite normal.
inline OrientedSurface mirror_of(const std::array<OrientedSurface, 2>& fingers) {
  OrientedSurface out;
  for (const auto& f : fingers)
    for (const auto& pn : f) out.push_back({pn.point, -pn.normal});
  return out;
}

inline double max_point_gap(const std::array<OrientedSurface, 2>& a,
                            const std::array<OrientedSurface, 2>& b) {
  double worst = 0.0;
  for (int j = 0; j < 2; ++j)
    for (std::size_t i = 0; i < a[j].size(); ++i) {
      worst = std::max(worst, (a[j][i].point - b[j][i].point).norm());
      worst = std::max(worst, (a[j][i].normal.vec() - b[j][i].normal.vec()).norm());
    }
  return worst;
}

inline SceneSpec slab_scene(double width = 0.03,
                            const Vec3& center = Vec3(0.04, -0.03, 0.12)) {
  SceneSpec s;
  s.name = "slab";
  s.generator = SyntheticObject{ObjectKind::kSlab, {0.06, width, 0.06}, 12, center};
  return s;
}

}  // namespace disf::testing

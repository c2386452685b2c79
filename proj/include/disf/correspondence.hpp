#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "disf/geometry.hpp"
#include "disf/gripper.hpp"
#include "disf/spatial_index.hpp"

namespace disf {

struct CorrespondencePair {
  PointNormal finger_point;  // p, n^p (current, transformed)
  PointNormal object_point;  // q, n^q
  Finger finger = Finger::kFirst;
  std::size_t finger_index = 0;  // into the finger's surface
  std::size_t object_index = 0;  // into the object surface
};

struct CorrespondenceSet {
  std::vector<CorrespondencePair> pairs;

  bool empty() const { return pairs.empty(); }
  std::size_t size() const { return pairs.size(); }

  std::size_t count(Finger j) const {
    std::size_t n = 0;
    for (const auto& p : pairs) n += (p.finger == j);
    return n;
  }

  auto begin() const { return pairs.begin(); }
  auto end() const { return pairs.end(); }
};

enum class CorrespondenceMode { kNearest, kFixed };

constexpr double kDefaultMaxNormalAngle = std::numbers::pi / 3.0;  // 60 deg

// Each finger point is paired with the closest object point whose normal
// opposes it to within `max_normal_angle`, i.e. n^p . n^q <= -cos(angle).
// Points without an admissible partner are dropped.
inline CorrespondenceSet match_nearest(
    const std::array<OrientedSurface, 2>& fingers,
    const OrientedSurface& object, const SpatialIndex& index,
    double max_normal_angle = kDefaultMaxNormalAngle) {
  if (object.empty()) throw InvalidInput("object surface is empty");
  if (fingers[0].empty() && fingers[1].empty())
    throw InvalidInput("finger surfaces are empty");

  const double bound = -std::cos(max_normal_angle);
  CorrespondenceSet out;
  for (Finger j : {Finger::kFirst, Finger::kSecond}) {
    const auto& surface = fingers[finger_slot(j)];
    for (std::size_t i = 0; i < surface.size(); ++i) {
      const auto& fp = surface[i];
      const auto hit = index.nearest_if(fp.point, [&](std::size_t k) {
        return fp.normal.vec().dot(object[k].normal.vec()) <= bound;
      });
      if (!hit) continue;
      out.pairs.push_back({fp, object[hit->index], j, i, hit->index});
    }
  }
  if (out.empty()) throw NoCorrespondence("every candidate pair was rejected");
  for (Finger j : {Finger::kFirst, Finger::kSecond})
    if (out.count(j) == 0)
      throw NoCorrespondence("finger " +
                             std::to_string(static_cast<int>(j)) +
                             " has no admissible object point");
  return out;
}

inline CorrespondenceSet match_nearest(
    const std::array<OrientedSurface, 2>& fingers,
    const OrientedSurface& object,
    double max_normal_angle = kDefaultMaxNormalAngle) {
  return match_nearest(fingers, object, SpatialIndex(object),
                       max_normal_angle);
}

// One user-supplied pair: finger point index, object point index, finger j.
struct FixedPair {
  std::size_t finger_index = 0;
  std::size_t object_index = 0;
  int finger = 1;

  bool operator==(const FixedPair&) const = default;
};

struct FixedPairSpec {
  std::string object_id;
  std::vector<FixedPair> pairs;

  bool operator==(const FixedPairSpec&) const = default;
};

inline CorrespondenceSet load_fixed_pairs(
    const FixedPairSpec& spec, const std::array<OrientedSurface, 2>& fingers,
    const OrientedSurface& object) {
  if (spec.pairs.empty()) throw InvalidInput("fixed pair list is empty");
  CorrespondenceSet out;
  for (const auto& fp : spec.pairs) {
    const Finger j = finger_from_index(fp.finger);
    const auto& surface = fingers[finger_slot(j)];
    if (fp.finger_index >= surface.size())
      throw InvalidInput("finger point index " +
                         std::to_string(fp.finger_index) + " out of range");
    if (fp.object_index >= object.size())
      throw InvalidInput("object point index " +
                         std::to_string(fp.object_index) + " out of range");
    out.pairs.push_back({surface[fp.finger_index], object[fp.object_index], j,
                         fp.finger_index, fp.object_index});
  }
  return out;
}

// Re-reads the finger side of every pair from the current finger surfaces.
inline void refresh_finger_points(CorrespondenceSet& corr,
                                  const std::array<OrientedSurface, 2>& fingers) {
  for (auto& p : corr.pairs)
    p.finger_point = fingers[finger_slot(p.finger)][p.finger_index];
}

}  // namespace disf

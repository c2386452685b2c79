#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <vector>

#include "disf/geometry.hpp"

namespace disf {

// Static 3-d tree over a surface's point positions. Nearest-neighbour queries
// are exact; equal distances resolve to the lowest point index.
class SpatialIndex {
 public:
  struct Hit {
    std::size_t index;
    double squared_distance;
  };

  SpatialIndex() = default;

  explicit SpatialIndex(const OrientedSurface& surface) {
    points_.reserve(surface.size());
    for (const auto& pn : surface) points_.push_back(pn.point);
    order_.resize(points_.size());
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    nodes_.reserve(points_.size());
    if (!points_.empty()) root_ = build(0, order_.size());
  }

  std::size_t size() const { return points_.size(); }

  std::optional<Hit> nearest(const Vec3& query) const {
    return nearest_if(query, [](std::size_t) { return true; });
  }

  // Nearest point among those for which `admissible(index)` holds.
  template <typename Predicate>
  std::optional<Hit> nearest_if(const Vec3& query,
                                Predicate&& admissible) const {
    Best best;
    if (root_ >= 0) search(root_, query, admissible, best);
    if (!best.found) return std::nullopt;
    return Hit{best.index, best.d2};
  }

 private:
  struct Node {
    std::size_t point;  // index into points_
    int axis;
    std::int32_t left = -1;
    std::int32_t right = -1;
  };

  struct Best {
    bool found = false;
    std::size_t index = 0;
    double d2 = std::numeric_limits<double>::infinity();

    void offer(std::size_t i, double d) {
      if (!found || d < d2 || (d == d2 && i < index)) {
        found = true;
        index = i;
        d2 = d;
      }
    }
  };

  std::int32_t build(std::size_t lo, std::size_t hi) {
    if (lo >= hi) return -1;
    // Split on the axis of largest spread.
    Vec3 mn = points_[order_[lo]], mx = mn;
    for (std::size_t i = lo + 1; i < hi; ++i) {
      mn = mn.cwiseMin(points_[order_[i]]);
      mx = mx.cwiseMax(points_[order_[i]]);
    }
    int axis = 0;
    (mx - mn).maxCoeff(&axis);

    const std::size_t mid = lo + (hi - lo) / 2;
    std::nth_element(order_.begin() + lo, order_.begin() + mid,
                     order_.begin() + hi, [&](std::size_t a, std::size_t b) {
                       const double pa = points_[a][axis], pb = points_[b][axis];
                       return pa < pb || (pa == pb && a < b);
                     });
    const auto id = static_cast<std::int32_t>(nodes_.size());
    nodes_.push_back({order_[mid], axis});
    const auto left = build(lo, mid);
    const auto right = build(mid + 1, hi);
    nodes_[id].left = left;
    nodes_[id].right = right;
    return id;
  }

  template <typename Predicate>
  void search(std::int32_t id, const Vec3& q, Predicate& admissible,
              Best& best) const {
    const Node& node = nodes_[id];
    const Vec3& p = points_[node.point];
    if (admissible(node.point)) best.offer(node.point, (p - q).squaredNorm());

    const double diff = q[node.axis] - p[node.axis];
    const std::int32_t near = diff < 0.0 ? node.left : node.right;
    const std::int32_t far = diff < 0.0 ? node.right : node.left;
    if (near >= 0) search(near, q, admissible, best);
    // Ties must still be visited so the lowest index wins.
    if (far >= 0 && (!best.found || diff * diff <= best.d2))
      search(far, q, admissible, best);
  }

  std::vector<Vec3> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
};

}  // namespace disf

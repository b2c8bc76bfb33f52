#pragma once

#include <span>
#include <utility>
#include <vector>

#include "edgebook/cluster/balanced_kmeans.hpp"

namespace edgebook::cluster {

struct Point2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Point2&) const = default;
};

// PCA onto the top two principal axes of the mean-centered data, ordered by
// explained variance. Each axis is oriented so that its largest-magnitude
// loading is positive (first such coordinate on ties). Axes with no variance
// project to 0, so a single vector or identical vectors all map to (0, 0).
[[nodiscard]] std::vector<Point2> project_2d(std::span<const Vector> vectors);

}  // namespace edgebook::cluster

#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace edgebook::cluster {

using Vector = std::vector<double>;

struct ClusterParams {
  int min_size = 10;
  int max_size = 20;
  int target_size = 15;
  int max_iters = 100;
  double tol = 1e-6;
  std::uint64_t seed = 0;
};

// min_size <= target_size <= max_size, all positive, tol >= 0.
void validate(const ClusterParams& params);

struct ClusterAssignment {
  std::vector<int> labels;
  std::vector<Vector> centroids;
  double inertia = 0.0;
  // Assignment cost after every Lloyd step, followed by the final inertia.
  std::vector<double> inertia_history;
  int iterations = 0;
  // True when no k satisfies both size bounds and the last cluster's upper
  // bound had to be raised.
  bool relaxed_max = false;
};

// Per-cluster cardinality bounds for a balanced assignment.
struct SizeBounds {
  std::vector<int> lower;
  std::vector<int> upper;
};

// k = max(1, round(n / target)), moved to the nearest k with
// k*min <= n <= k*max (ties toward the smaller k). n < min gives 1. If no k
// is feasible, the largest k with k*min <= n that does not exceed the
// initial guess is returned.
[[nodiscard]] int choose_k(int n, const ClusterParams& params);
[[nodiscard]] bool is_feasible_k(int n, int k, const ClusterParams& params);

// Bounds used by cluster_constrained for n points in k clusters. When k*max
// is too small, the last cluster's upper bound absorbs the remainder.
[[nodiscard]] SizeBounds size_bounds(int n, int k, const ClusterParams& params);

struct BalancedAssignment {
  std::vector<int> labels;
  double cost = 0.0;
};

[[nodiscard]] double squared_distance(std::span<const double> a,
                                      std::span<const double> b);

// Assigns every point to a centroid so that cluster j receives between
// bounds.lower[j] and bounds.upper[j] points, minimizing total squared
// distance. Solved exactly as a min-cost flow:
//
//   source -> point (cap 1) -> cluster j (cap 1, cost d^2)
//   cluster j -> sink (cap lower[j])
//   cluster j -> overflow (cap upper[j] - lower[j]) -> sink (cap n - sum lower)
//
// A flow of value n saturates every arc into the sink, so every lower bound
// is met, and no cluster exceeds its upper bound.
[[nodiscard]] BalancedAssignment assign_balanced(std::span<const Vector> points,
                                                 std::span<const Vector> centroids,
                                                 const SizeBounds& bounds);

// Lloyd iterations with the balanced assignment step. Seeding is
// k-means++ over a canonical ordering of the inputs (by content hash), so
// permuting the input permutes the output labels identically.
[[nodiscard]] ClusterAssignment cluster_constrained(std::span<const Vector> vectors,
                                                    const ClusterParams& params);

}  // namespace edgebook::cluster

#include "edgebook/cluster/balanced_kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "edgebook/cluster/min_cost_flow.hpp"
#include "edgebook/core/errors.hpp"
#include "edgebook/core/text.hpp"

namespace edgebook::cluster {
namespace {

void check_dimensions(std::span<const Vector> vectors) {
  if (vectors.empty()) fail(ErrorCode::kEmptyInput, "no vectors to cluster");
  const std::size_t dim = vectors.front().size();
  for (const auto& v : vectors) {
    if (v.size() != dim) {
      fail(ErrorCode::kDimensionMismatch,
           "vector dimension " + std::to_string(v.size()) + " != " +
               std::to_string(dim));
    }
  }
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * n));
}

std::uint64_t content_hash(const Vector& v) {
  return fnv1a64(std::as_bytes(std::span<const double>(v)));
}

// Ordering on vector content alone, independent of input position.
std::vector<std::size_t> canonical_order(std::span<const Vector> vectors) {
  std::vector<std::uint64_t> hashes(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) hashes[i] = content_hash(vectors[i]);
  std::vector<std::size_t> order(vectors.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (hashes[a] != hashes[b]) return hashes[a] < hashes[b];
    return vectors[a] < vectors[b];
  });
  return order;
}

std::vector<Vector> seed_plus_plus(std::span<const Vector> points, int k,
                                   std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t n = points.size();
  std::vector<Vector> centers;
  centers.reserve(k);
  centers.push_back(points[uniform_index(rng, n)]);
  std::vector<double> nearest(n);
  for (std::size_t i = 0; i < n; ++i) nearest[i] = squared_distance(points[i], centers[0]);
  while (static_cast<int>(centers.size()) < k) {
    const double total = std::accumulate(nearest.begin(), nearest.end(), 0.0);
    std::size_t pick = 0;
    if (total <= 0.0) {
      pick = uniform_index(rng, n);
    } else {
      const double target = uniform01(rng) * total;
      double running = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        running += nearest[i];
        if (running > target && nearest[i] > 0.0) {
          pick = i;
          break;
        }
      }
    }
    centers.push_back(points[pick]);
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], squared_distance(points[i], centers.back()));
    }
  }
  return centers;
}

std::vector<Vector> member_means(std::span<const Vector> points,
                                 const std::vector<int>& labels, int k,
                                 const std::vector<Vector>& previous) {
  const std::size_t dim = points.front().size();
  std::vector<Vector> means(k, Vector(dim, 0.0));
  std::vector<int> counts(k, 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int c = labels[i];
    ++counts[c];
    for (std::size_t d = 0; d < dim; ++d) means[c][d] += points[i][d];
  }
  for (int c = 0; c < k; ++c) {
    if (counts[c] == 0) {
      means[c] = previous[c];
      continue;
    }
    for (double& x : means[c]) x /= counts[c];
  }
  return means;
}

double total_cost(std::span<const Vector> points, const std::vector<int>& labels,
                  const std::vector<Vector>& centroids) {
  double cost = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    cost += squared_distance(points[i], centroids[labels[i]]);
  }
  return cost;
}

}  // namespace

void validate(const ClusterParams& params) {
  if (params.min_size < 1 || params.max_size < 1 || params.target_size < 1 ||
      params.max_iters < 1) {
    fail(ErrorCode::kInvalidArgument, "cluster sizes and max_iters must be positive");
  }
  if (!(params.min_size <= params.target_size &&
        params.target_size <= params.max_size)) {
    fail(ErrorCode::kInvalidArgument,
         "cluster params need min_size <= target_size <= max_size");
  }
  if (!(params.tol >= 0.0)) fail(ErrorCode::kInvalidArgument, "tol must be >= 0");
}

bool is_feasible_k(int n, int k, const ClusterParams& params) {
  return k >= 1 && static_cast<long long>(k) * params.min_size <= n &&
         n <= static_cast<long long>(k) * params.max_size;
}

int choose_k(int n, const ClusterParams& params) {
  validate(params);
  if (n < 1) fail(ErrorCode::kInvalidArgument, "choose_k needs n >= 1");
  if (n < params.min_size) return 1;
  const int guess = std::max(
      1, static_cast<int>(std::lround(static_cast<double>(n) / params.target_size)));
  const int k_low = (n + params.max_size - 1) / params.max_size;
  const int k_high = n / params.min_size;
  if (k_low <= k_high) return std::clamp(guess, k_low, k_high);
  return std::max(1, std::min(guess, k_high));
}

SizeBounds size_bounds(int n, int k, const ClusterParams& params) {
  SizeBounds bounds;
  if (k == 1) {
    bounds.lower.assign(1, n);
    bounds.upper.assign(1, n);
    return bounds;
  }
  bounds.lower.assign(k, params.min_size);
  bounds.upper.assign(k, params.max_size);
  const long long capacity = static_cast<long long>(k) * params.max_size;
  if (capacity < n) bounds.upper.back() += static_cast<int>(n - capacity);
  return bounds;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

BalancedAssignment assign_balanced(std::span<const Vector> points,
                                   std::span<const Vector> centroids,
                                   const SizeBounds& bounds) {
  const int n = static_cast<int>(points.size());
  const int k = static_cast<int>(centroids.size());
  if (n == 0) fail(ErrorCode::kEmptyInput, "no points to assign");
  if (k == 0) fail(ErrorCode::kEmptyInput, "no centroids");
  if (static_cast<int>(bounds.lower.size()) != k ||
      static_cast<int>(bounds.upper.size()) != k) {
    fail(ErrorCode::kInvalidArgument, "size bounds must have one entry per centroid");
  }
  long long lower_sum = 0;
  long long upper_sum = 0;
  for (int j = 0; j < k; ++j) {
    if (bounds.lower[j] < 0 || bounds.lower[j] > bounds.upper[j]) {
      fail(ErrorCode::kInvalidArgument, "size bounds need 0 <= lower <= upper");
    }
    lower_sum += bounds.lower[j];
    upper_sum += bounds.upper[j];
  }
  if (lower_sum > n || upper_sum < n) {
    fail(ErrorCode::kInvalidArgument, "size bounds cannot be met by " +
                                          std::to_string(n) + " points");
  }

  // Nodes: source, points, clusters, overflow, sink.
  const int source = 0;
  const int first_point = 1;
  const int first_cluster = first_point + n;
  const int overflow = first_cluster + k;
  const int sink = overflow + 1;
  MinCostFlow flow(sink + 1);
  std::vector<int> arc_ids(static_cast<std::size_t>(n) * k);
  for (int i = 0; i < n; ++i) {
    flow.add_edge(source, first_point + i, 1, 0.0);
    for (int j = 0; j < k; ++j) {
      arc_ids[static_cast<std::size_t>(i) * k + j] = flow.add_edge(
          first_point + i, first_cluster + j, 1, squared_distance(points[i], centroids[j]));
    }
  }
  for (int j = 0; j < k; ++j) {
    if (bounds.lower[j] > 0) flow.add_edge(first_cluster + j, sink, bounds.lower[j], 0.0);
    if (bounds.upper[j] > bounds.lower[j]) {
      flow.add_edge(first_cluster + j, overflow, bounds.upper[j] - bounds.lower[j], 0.0);
    }
  }
  if (n > lower_sum) flow.add_edge(overflow, sink, static_cast<int>(n - lower_sum), 0.0);

  const auto result = flow.solve(source, sink, n);
  if (result.flow != n) {
    fail(ErrorCode::kInvalidArgument, "balanced assignment is infeasible");
  }
  BalancedAssignment out;
  out.labels.assign(n, -1);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) {
      if (flow.flow_on(arc_ids[static_cast<std::size_t>(i) * k + j]) > 0) {
        out.labels[i] = j;
        break;
      }
    }
    out.cost += squared_distance(points[i], centroids[out.labels[i]]);
  }
  return out;
}

ClusterAssignment cluster_constrained(std::span<const Vector> vectors,
                                      const ClusterParams& params) {
  validate(params);
  check_dimensions(vectors);
  const int n = static_cast<int>(vectors.size());
  const int k = choose_k(n, params);

  const auto order = canonical_order(vectors);
  std::vector<Vector> points;
  points.reserve(n);
  for (std::size_t idx : order) points.push_back(vectors[idx]);

  ClusterAssignment out;
  std::vector<int> labels(n, 0);
  std::vector<Vector> centroids;

  if (k == 1) {
    centroids = member_means(points, labels, 1, {points.front()});
    out.inertia_history.push_back(total_cost(points, labels, centroids));
    out.iterations = 1;
    out.relaxed_max = n > params.max_size;
  } else {
    const SizeBounds bounds = size_bounds(n, k, params);
    out.relaxed_max = bounds.upper.back() > params.max_size;
    centroids = seed_plus_plus(points, k, params.seed);
    double previous = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < params.max_iters; ++iter) {
      auto step = assign_balanced(points, centroids, bounds);
      labels = std::move(step.labels);
      out.inertia_history.push_back(step.cost);
      out.iterations = iter + 1;
      const bool converged = previous - step.cost < params.tol;
      previous = step.cost;
      centroids = member_means(points, labels, k, centroids);
      if (converged) break;
    }
  }

  out.inertia = total_cost(points, labels, centroids);
  out.inertia_history.push_back(out.inertia);
  out.centroids = std::move(centroids);
  out.labels.assign(n, 0);
  for (int i = 0; i < n; ++i) out.labels[order[i]] = labels[i];
  return out;
}

}  // namespace edgebook::cluster

#include "edgebook/cluster/min_cost_flow.hpp"

#include <algorithm>
#include <functional>
#include <queue>
#include <stdexcept>
#include <utility>

namespace edgebook::cluster {
namespace {

constexpr double kUnreachable = std::numeric_limits<double>::infinity();
// Relaxations must improve by more than this; it keeps round-off in the
// reduced costs from cycling the label-correcting loop.
constexpr double kRelaxEpsilon = 1e-12;

}  // namespace

MinCostFlow::MinCostFlow(int num_nodes)
    : adjacency_(num_nodes),
      potential_(num_nodes, 0.0),
      distance_(num_nodes, kUnreachable),
      parent_arc_(num_nodes, -1) {
  if (num_nodes <= 0) throw std::invalid_argument("MinCostFlow needs nodes");
}

int MinCostFlow::add_edge(int from, int to, int capacity, double cost) {
  if (from < 0 || to < 0 || from >= num_nodes() || to >= num_nodes()) {
    throw std::out_of_range("MinCostFlow::add_edge node out of range");
  }
  if (capacity < 0 || cost < 0.0) {
    throw std::invalid_argument("MinCostFlow arcs need capacity >= 0, cost >= 0");
  }
  const int id = static_cast<int>(arcs_.size());
  arcs_.push_back({to, capacity, cost, 0});
  arcs_.push_back({from, 0, -cost, 0});
  adjacency_[from].push_back(id);
  adjacency_[to].push_back(id + 1);
  return id;
}

int MinCostFlow::flow_on(int edge_id) const { return arcs_.at(edge_id).flow; }

bool MinCostFlow::shortest_path(int source, int sink) {
  std::fill(distance_.begin(), distance_.end(), kUnreachable);
  std::fill(parent_arc_.begin(), parent_arc_.end(), -1);
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  distance_[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, v] = heap.top();
    heap.pop();
    if (d > distance_[v]) continue;
    for (int id : adjacency_[v]) {
      const Arc& arc = arcs_[id];
      if (arc.flow >= arc.capacity) continue;
      const double reduced = arc.cost + potential_[v] - potential_[arc.to];
      const double candidate = d + reduced;
      if (candidate < distance_[arc.to] - kRelaxEpsilon) {
        distance_[arc.to] = candidate;
        parent_arc_[arc.to] = id;
        heap.emplace(candidate, arc.to);
      }
    }
  }
  if (distance_[sink] == kUnreachable) return false;
  const double cap = distance_[sink];
  for (int v = 0; v < num_nodes(); ++v) {
    potential_[v] += std::min(distance_[v], cap);
  }
  return true;
}

MinCostFlow::Result MinCostFlow::solve(int source, int sink, int flow_limit) {
  Result result;
  while (result.flow < flow_limit && shortest_path(source, sink)) {
    int push = flow_limit - result.flow;
    for (int v = sink; v != source;) {
      const int id = parent_arc_[v];
      push = std::min(push, arcs_[id].capacity - arcs_[id].flow);
      v = arcs_[id ^ 1].to;
    }
    for (int v = sink; v != source;) {
      const int id = parent_arc_[v];
      arcs_[id].flow += push;
      arcs_[id ^ 1].flow -= push;
      result.cost += push * arcs_[id].cost;
      v = arcs_[id ^ 1].to;
    }
    result.flow += push;
  }
  return result;
}

}  // namespace edgebook::cluster

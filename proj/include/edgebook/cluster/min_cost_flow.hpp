#pragma once

#include <limits>
#include <vector>

namespace edgebook::cluster {

// Successive shortest paths with Johnson potentials and a binary-heap
// Dijkstra. Capacities are integral, costs real. All arc costs passed to
// add_edge must be non-negative, so the initial potentials are zero.
class MinCostFlow {
 public:
  struct Result {
    int flow = 0;
    double cost = 0.0;
  };

  explicit MinCostFlow(int num_nodes);

  // Returns the id of the forward arc; pass it to flow_on() after solve().
  int add_edge(int from, int to, int capacity, double cost);

  Result solve(int source, int sink,
               int flow_limit = std::numeric_limits<int>::max());

  [[nodiscard]] int flow_on(int edge_id) const;
  [[nodiscard]] int num_nodes() const { return static_cast<int>(adjacency_.size()); }

 private:
  struct Arc {
    int to;
    int capacity;
    double cost;
    int flow;
  };

  bool shortest_path(int source, int sink);

  std::vector<Arc> arcs_;
  std::vector<std::vector<int>> adjacency_;
  std::vector<double> potential_;
  std::vector<double> distance_;
  std::vector<int> parent_arc_;
};

}  // namespace edgebook::cluster

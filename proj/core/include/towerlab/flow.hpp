#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace towerlab {

// Dinic max flow with integer capacities. Deterministic: augmenting paths are
// explored in edge insertion order.
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t nodes);

  std::size_t add_node();
  // Returns the edge index, usable with flow_on().
  std::size_t add_edge(std::size_t from, std::size_t to, std::int64_t capacity);
  std::int64_t solve(std::size_t source, std::size_t sink);
  std::int64_t flow_on(std::size_t edge) const;
  std::size_t num_nodes() const { return adj_.size(); }

 private:
  struct Edge {
    std::size_t to;
    std::size_t rev;
    std::int64_t cap;
    std::int64_t original;
  };
  bool bfs(std::size_t s, std::size_t t);
  std::int64_t dfs(std::size_t v, std::size_t t, std::int64_t pushed);

  std::vector<std::vector<Edge>> adj_;
  std::vector<std::pair<std::size_t, std::size_t>> handles_;
  std::vector<int> level_;
  std::vector<std::size_t> iter_;
};

}  // namespace towerlab

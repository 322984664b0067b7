#include "towerlab/flow.hpp"

#include "towerlab/errors.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace towerlab {

MaxFlow::MaxFlow(std::size_t nodes) : adj_(nodes) {}

std::size_t MaxFlow::add_node() {
  adj_.emplace_back();
  return adj_.size() - 1;
}

std::size_t MaxFlow::add_edge(std::size_t from, std::size_t to, std::int64_t capacity) {
  if (from >= adj_.size() || to >= adj_.size()) throw InvalidInput("flow edge endpoint out of range");
  if (capacity < 0) throw InvalidInput("negative flow capacity");
  adj_[from].push_back({to, adj_[to].size() + (from == to ? 1 : 0), capacity, capacity});
  adj_[to].push_back({from, adj_[from].size() - 1, 0, 0});
  handles_.emplace_back(from, adj_[from].size() - 1);
  return handles_.size() - 1;
}

std::int64_t MaxFlow::flow_on(std::size_t edge) const {
  const auto [node, idx] = handles_.at(edge);
  const Edge& e = adj_[node][idx];
  return e.original - e.cap;
}

bool MaxFlow::bfs(std::size_t s, std::size_t t) {
  level_.assign(adj_.size(), -1);
  std::queue<std::size_t> q;
  level_[s] = 0;
  q.push(s);
  while (!q.empty()) {
    const auto v = q.front();
    q.pop();
    for (const Edge& e : adj_[v]) {
      if (e.cap > 0 && level_[e.to] < 0) {
        level_[e.to] = level_[v] + 1;
        q.push(e.to);
      }
    }
  }
  return level_[t] >= 0;
}

std::int64_t MaxFlow::dfs(std::size_t v, std::size_t t, std::int64_t pushed) {
  if (v == t) return pushed;
  for (auto& i = iter_[v]; i < adj_[v].size(); ++i) {
    Edge& e = adj_[v][i];
    if (e.cap <= 0 || level_[e.to] != level_[v] + 1) continue;
    const std::int64_t got = dfs(e.to, t, std::min(pushed, e.cap));
    if (got > 0) {
      e.cap -= got;
      adj_[e.to][e.rev].cap += got;
      return got;
    }
  }
  return 0;
}

std::int64_t MaxFlow::solve(std::size_t source, std::size_t sink) {
  if (source == sink) throw InvalidInput("flow source equals sink");
  std::int64_t total = 0;
  while (bfs(source, sink)) {
    iter_.assign(adj_.size(), 0);
    while (std::int64_t f = dfs(source, sink, std::numeric_limits<std::int64_t>::max())) total += f;
  }
  return total;
}

}  // namespace towerlab

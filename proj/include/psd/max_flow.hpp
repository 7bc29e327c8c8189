#pragma once

// Dinic's blocking-flow algorithm over an arbitrary ordered capacity type.
// With an integer capacity type the result is exact; with double, residual
// capacities at or below `epsilon` count as saturated.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <queue>
#include <vector>

namespace psd {

template <class Cap>
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t nodes, Cap epsilon = Cap(0)) : adjacency_(nodes), epsilon_(epsilon) {}

  /// Returns the id of the forward arc.
  std::size_t add_edge(std::size_t from, std::size_t to, Cap capacity) {
    const std::size_t id = arcs_.size();
    arcs_.push_back({to, capacity, capacity});
    arcs_.push_back({from, Cap(0), Cap(0)});
    adjacency_[from].push_back(id);
    adjacency_[to].push_back(id + 1);
    return id;
  }

  Cap solve(std::size_t source, std::size_t sink) {
    Cap total(0);
    while (build_levels(source, sink)) {
      next_arc_.assign(adjacency_.size(), 0);
      for (;;) {
        Cap pushed = augment(source, sink, Cap(-1));
        if (!(pushed > epsilon_)) break;
        total += pushed;
      }
    }
    return total;
  }

  Cap flow_on(std::size_t arc) const { return arcs_[arc].capacity - arcs_[arc].residual; }

  /// Nodes reachable from the source through unsaturated arcs, after solve().
  std::vector<bool> residual_reachable(std::size_t source) const {
    std::vector<bool> seen(adjacency_.size(), false);
    std::vector<std::size_t> stack{source};
    seen[source] = true;
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t id : adjacency_[u]) {
        const Arc& a = arcs_[id];
        if (a.residual > epsilon_ && !seen[a.to]) {
          seen[a.to] = true;
          stack.push_back(a.to);
        }
      }
    }
    return seen;
  }

 private:
  struct Arc {
    std::size_t to;
    Cap residual;
    Cap capacity;
  };

  bool build_levels(std::size_t source, std::size_t sink) {
    level_.assign(adjacency_.size(), kUnreached);
    level_[source] = 0;
    std::queue<std::size_t> queue;
    queue.push(source);
    while (!queue.empty()) {
      std::size_t u = queue.front();
      queue.pop();
      for (std::size_t id : adjacency_[u]) {
        const Arc& a = arcs_[id];
        if (a.residual > epsilon_ && level_[a.to] == kUnreached) {
          level_[a.to] = level_[u] + 1;
          queue.push(a.to);
        }
      }
    }
    return level_[sink] != kUnreached;
  }

  // limit < 0 means unbounded (only at the source).
  Cap augment(std::size_t u, std::size_t sink, Cap limit) {
    if (u == sink) return limit;
    for (std::size_t& k = next_arc_[u]; k < adjacency_[u].size(); ++k) {
      const std::size_t id = adjacency_[u][k];
      Arc& a = arcs_[id];
      if (!(a.residual > epsilon_) || level_[a.to] != level_[u] + 1) continue;
      Cap want = (limit < Cap(0) || a.residual < limit) ? a.residual : limit;
      Cap got = augment(a.to, sink, want);
      if (got > epsilon_) {
        a.residual -= got;
        arcs_[id ^ 1].residual += got;
        return got;
      }
    }
    return Cap(0);
  }

  static constexpr std::size_t kUnreached = std::numeric_limits<std::size_t>::max();

  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<Arc> arcs_;
  std::vector<std::size_t> level_;
  std::vector<std::size_t> next_arc_;
  Cap epsilon_;
};

}  // namespace psd

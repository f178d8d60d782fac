#pragma once

// Small directed-graph toolkit: SCCs, shortest paths/cycles, DAG longest path.
// Nodes are dense indices; every edge carries a label of type L.

#include <algorithm>
#include <cstddef>
#include <deque>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace hydiag::graph {

template <typename L>
struct Edge {
  std::size_t to;
  L label;
};

template <typename L>
class Digraph {
 public:
  explicit Digraph(std::size_t n = 0) : adj_(n) {}

  std::size_t size() const noexcept { return adj_.size(); }
  std::size_t add_node() {
    adj_.emplace_back();
    return adj_.size() - 1;
  }
  void add_edge(std::size_t from, std::size_t to, L label) {
    adj_[from].push_back({to, std::move(label)});
  }
  const std::vector<Edge<L>>& out(std::size_t u) const { return adj_[u]; }

 private:
  std::vector<std::vector<Edge<L>>> adj_;
};

// A path as the sequence of nodes and the labels of the edges between them.
template <typename L>
struct Path {
  std::vector<std::size_t> nodes;
  std::vector<L> labels;
};

// Tarjan, iterative. Returns the component index of each node.
template <typename L>
std::vector<std::size_t> strongly_connected_components(const Digraph<L>& g) {
  constexpr auto none = std::numeric_limits<std::size_t>::max();
  const auto n = g.size();
  std::vector<std::size_t> index(n, none), low(n, 0), comp(n, none);
  std::vector<char> on_stack(n, 0);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> call;  // node, next edge
  std::size_t counter = 0, ncomp = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != none) continue;
    call.emplace_back(root, 0);
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      auto& [u, i] = call.back();
      if (i < g.out(u).size()) {
        const std::size_t v = g.out(u)[i++].to;
        if (index[v] == none) {
          index[v] = low[v] = counter++;
          stack.push_back(v);
          on_stack[v] = 1;
          call.emplace_back(v, 0);
        } else if (on_stack[v]) {
          low[u] = std::min(low[u], index[v]);
        }
        continue;
      }
      const std::size_t done = u;
      call.pop_back();
      if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
      if (low[done] == index[done]) {
        std::size_t w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = ncomp;
        } while (w != done);
        ++ncomp;
      }
    }
  }
  return comp;
}

// Nodes lying on some cycle: members of a component with more than one node,
// or with a self-loop.
template <typename L>
std::vector<char> cyclic_nodes(const Digraph<L>& g) {
  const auto comp = strongly_connected_components(g);
  std::vector<std::size_t> comp_size(g.size(), 0);
  for (auto c : comp) ++comp_size[c];
  std::vector<char> out(g.size(), 0);
  for (std::size_t u = 0; u < g.size(); ++u) {
    if (comp_size[comp[u]] > 1) out[u] = 1;
    for (const auto& e : g.out(u))
      if (e.to == u) out[u] = 1;
  }
  return out;
}

// Shortest path (by edge count) from any source to a node satisfying `goal`.
template <typename L, typename Goal>
std::optional<Path<L>> shortest_path(const Digraph<L>& g, const std::vector<std::size_t>& sources,
                                     Goal goal) {
  constexpr auto none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> parent(g.size(), none), parent_edge(g.size(), none);
  std::vector<char> seen(g.size(), 0);
  std::deque<std::size_t> q;
  for (auto s : sources)
    if (!seen[s]) {
      seen[s] = 1;
      q.push_back(s);
    }
  while (!q.empty()) {
    const auto u = q.front();
    q.pop_front();
    if (goal(u)) {
      Path<L> p;
      for (auto v = u; v != none; v = parent[v]) {
        p.nodes.push_back(v);
        if (parent[v] != none) p.labels.push_back(g.out(parent[v])[parent_edge[v]].label);
      }
      std::reverse(p.nodes.begin(), p.nodes.end());
      std::reverse(p.labels.begin(), p.labels.end());
      return p;
    }
    for (std::size_t i = 0; i < g.out(u).size(); ++i) {
      const auto v = g.out(u)[i].to;
      if (!seen[v]) {
        seen[v] = 1;
        parent[v] = u;
        parent_edge[v] = i;
        q.push_back(v);
      }
    }
  }
  return std::nullopt;
}

// Shortest cycle through `start` using only nodes with allowed[v] set. The
// returned path starts and ends at `start`.
template <typename L>
std::optional<Path<L>> shortest_cycle_through(const Digraph<L>& g, std::size_t start,
                                              const std::vector<char>& allowed) {
  for (const auto& e : g.out(start))
    if (e.to == start) return Path<L>{{start, start}, {e.label}};
  constexpr auto none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> parent(g.size(), none), parent_edge(g.size(), none);
  std::vector<char> seen(g.size(), 0);
  std::deque<std::size_t> q;
  for (std::size_t i = 0; i < g.out(start).size(); ++i) {
    const auto v = g.out(start)[i].to;
    if (allowed[v] && !seen[v]) {
      seen[v] = 1;
      parent[v] = start;
      parent_edge[v] = i;
      q.push_back(v);
    }
  }
  while (!q.empty()) {
    const auto u = q.front();
    q.pop_front();
    for (std::size_t i = 0; i < g.out(u).size(); ++i) {
      const auto v = g.out(u)[i].to;
      if (v == start) {
        Path<L> p;
        p.nodes.push_back(start);
        p.labels.push_back(g.out(u)[i].label);
        for (auto w = u; w != start; w = parent[w]) {
          p.nodes.push_back(w);
          p.labels.push_back(g.out(parent[w])[parent_edge[w]].label);
        }
        p.nodes.push_back(start);
        std::reverse(p.nodes.begin(), p.nodes.end());
        std::reverse(p.labels.begin(), p.labels.end());
        return p;
      }
      if (allowed[v] && !seen[v]) {
        seen[v] = 1;
        parent[v] = u;
        parent_edge[v] = i;
        q.push_back(v);
      }
    }
  }
  return std::nullopt;
}

// Number of nodes on the longest path of an acyclic graph (0 for an empty
// graph). Behavior is undefined on cyclic input; callers check first.
template <typename L>
std::size_t longest_path_nodes(const Digraph<L>& g) {
  const auto n = g.size();
  std::vector<std::size_t> indeg(n, 0), best(n, 1);
  for (std::size_t u = 0; u < n; ++u)
    for (const auto& e : g.out(u)) ++indeg[e.to];
  std::deque<std::size_t> q;
  for (std::size_t u = 0; u < n; ++u)
    if (indeg[u] == 0) q.push_back(u);
  std::size_t result = n ? 1 : 0;
  while (!q.empty()) {
    const auto u = q.front();
    q.pop_front();
    result = std::max(result, best[u]);
    for (const auto& e : g.out(u)) {
      best[e.to] = std::max(best[e.to], best[u] + 1);
      if (--indeg[e.to] == 0) q.push_back(e.to);
    }
  }
  return result;
}

}  // namespace hydiag::graph

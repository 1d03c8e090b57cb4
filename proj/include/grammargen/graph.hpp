#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "grammargen/error.hpp"

namespace grammargen {

using NodeId = std::uint32_t;

inline constexpr int kUnreached = -1;

struct Node {
  std::string label;
  std::optional<std::uint32_t> cid;

  bool operator==(const Node&) const = default;
};

struct Edge {
  NodeId a = 0;
  NodeId b = 0;
  std::string label;

  bool operator==(const Edge&) const = default;

  NodeId other(NodeId v) const noexcept { return v == a ? b : a; }
};

/// Undirected simple graph with string labels on nodes and edges and an
/// optional contraction id per node. Node ids are dense, 0..n-1, in
/// insertion order; edge order is insertion order too.
class LabeledGraph {
 public:
  struct Adjacent {
    NodeId node;
    std::uint32_t edge;
  };

  NodeId add_node(std::string label, std::optional<std::uint32_t> cid = std::nullopt) {
    nodes_.push_back(Node{std::move(label), cid});
    adjacency_.emplace_back();
    return static_cast<NodeId>(nodes_.size() - 1);
  }

  void add_edge(NodeId a, NodeId b, std::string label) {
    if (a >= nodes_.size() || b >= nodes_.size())
      throw Error(ErrorKind::invalid_argument, "edge endpoint out of range");
    if (a == b) throw Error(ErrorKind::invalid_argument, "self-loop on node " + std::to_string(a));
    if (has_edge(a, b))
      throw Error(ErrorKind::invalid_argument,
                  "parallel edge " + std::to_string(a) + "-" + std::to_string(b));
    const auto index = static_cast<std::uint32_t>(edges_.size());
    edges_.push_back(Edge{a, b, std::move(label)});
    adjacency_[a].push_back({b, index});
    adjacency_[b].push_back({a, index});
  }

  void set_cid(NodeId v, std::optional<std::uint32_t> cid) { nodes_.at(v).cid = cid; }
  void set_label(NodeId v, std::string label) { nodes_.at(v).label = std::move(label); }

  void clear_cids() noexcept {
    for (auto& n : nodes_) n.cid.reset();
  }

  std::size_t node_count() const noexcept { return nodes_.size(); }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  bool empty() const noexcept { return nodes_.empty(); }

  const Node& node(NodeId v) const { return nodes_.at(v); }
  const std::string& label(NodeId v) const { return nodes_.at(v).label; }
  const Edge& edge(std::uint32_t e) const { return edges_.at(e); }

  std::span<const Node> nodes() const noexcept { return nodes_; }
  std::span<const Edge> edges() const noexcept { return edges_; }
  std::span<const Adjacent> neighbors(NodeId v) const { return adjacency_.at(v); }
  std::size_t degree(NodeId v) const { return adjacency_.at(v).size(); }

  const Edge* find_edge(NodeId a, NodeId b) const {
    if (a >= adjacency_.size() || b >= adjacency_.size()) return nullptr;
    const auto& small = adjacency_[a].size() <= adjacency_[b].size() ? adjacency_[a] : adjacency_[b];
    const NodeId target = adjacency_[a].size() <= adjacency_[b].size() ? b : a;
    for (const auto& adj : small)
      if (adj.node == target) return &edges_[adj.edge];
    return nullptr;
  }

  bool has_edge(NodeId a, NodeId b) const { return find_edge(a, b) != nullptr; }

  bool operator==(const LabeledGraph& o) const { return nodes_ == o.nodes_ && edges_ == o.edges_; }

 private:
  std::vector<Node> nodes_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Adjacent>> adjacency_;
};

/// A graph with compacted ids plus the id each node had in its source graph.
struct Subgraph {
  LabeledGraph graph;
  std::vector<NodeId> origin;
};

inline void require_node(const LabeledGraph& g, NodeId v) {
  if (v >= g.node_count())
    throw Error(ErrorKind::invalid_argument, "unknown node id " + std::to_string(v));
}

/// BFS distances from a set of sources, truncated at `limit` hops.
inline std::vector<int> distances_from(const LabeledGraph& g, std::span<const NodeId> sources, int limit) {
  std::vector<int> dist(g.node_count(), kUnreached);
  std::deque<NodeId> queue;
  for (NodeId s : sources) {
    require_node(g, s);
    if (dist[s] == kUnreached) {
      dist[s] = 0;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const NodeId v = queue.front();
    queue.pop_front();
    if (dist[v] >= limit) continue;
    for (const auto& adj : g.neighbors(v)) {
      if (dist[adj.node] == kUnreached) {
        dist[adj.node] = dist[v] + 1;
        queue.push_back(adj.node);
      }
    }
  }
  return dist;
}

inline std::vector<int> distances_from(const LabeledGraph& g, NodeId root, int limit) {
  const NodeId sources[] = {root};
  return distances_from(g, std::span<const NodeId>(sources), limit);
}

/// Nodes at shortest-path distance <= radius from root, ascending.
inline std::vector<NodeId> neighborhood(const LabeledGraph& g, NodeId root, unsigned radius) {
  require_node(g, root);
  const auto dist = distances_from(g, root, static_cast<int>(radius));
  std::vector<NodeId> out;
  for (NodeId v = 0; v < dist.size(); ++v)
    if (dist[v] != kUnreached) out.push_back(v);
  return out;
}

/// Subgraph induced by `keep` (deduplicated, ascending order). Labels and
/// cids are preserved; edges keep their relative order.
inline Subgraph induced_subgraph(const LabeledGraph& g, std::span<const NodeId> keep) {
  std::vector<NodeId> sorted(keep.begin(), keep.end());
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  constexpr NodeId kAbsent = UINT32_MAX;
  std::vector<NodeId> index(g.node_count(), kAbsent);
  Subgraph out;
  out.origin = sorted;
  for (NodeId v : sorted) {
    require_node(g, v);
    index[v] = out.graph.add_node(g.node(v).label, g.node(v).cid);
  }
  for (const auto& e : g.edges())
    if (index[e.a] != kAbsent && index[e.b] != kAbsent) out.graph.add_edge(index[e.a], index[e.b], e.label);
  return out;
}

/// Component index per node; components numbered by their smallest node.
inline std::vector<std::uint32_t> connected_components(const LabeledGraph& g, std::size_t* count = nullptr) {
  constexpr std::uint32_t kNone = UINT32_MAX;
  std::vector<std::uint32_t> comp(g.node_count(), kNone);
  std::uint32_t next = 0;
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < g.node_count(); ++s) {
    if (comp[s] != kNone) continue;
    comp[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      for (const auto& adj : g.neighbors(v)) {
        if (comp[adj.node] == kNone) {
          comp[adj.node] = next;
          stack.push_back(adj.node);
        }
      }
    }
    ++next;
  }
  if (count) *count = next;
  return comp;
}

/// True iff g has at most one connected component (the empty graph counts).
inline bool is_connected(const LabeledGraph& g) {
  std::size_t count = 0;
  connected_components(g, &count);
  return count <= 1;
}

}  // namespace grammargen

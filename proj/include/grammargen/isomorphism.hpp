#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "grammargen/certificate.hpp"
#include "grammargen/graph.hpp"

namespace grammargen {

namespace detail {

class IsomorphismSearch {
 public:
  IsomorphismSearch(const LabeledGraph& from, std::span<const std::uint64_t> from_marks, const LabeledGraph& to,
                    std::span<const std::uint64_t> to_marks)
      : from_(from), to_(to) {
    from_colors_ = refine_colors(from, from_marks);
    to_colors_ = refine_colors(to, to_marks);
    order_ = connectivity_order(from);
    mapping_.assign(from.node_count(), kFree);
    used_.assign(to.node_count(), false);
  }

  std::optional<std::vector<NodeId>> run() {
    if (from_.node_count() != to_.node_count() || from_.edge_count() != to_.edge_count()) return std::nullopt;
    if (!extend(0)) return std::nullopt;
    return mapping_;
  }

 private:
  static constexpr NodeId kFree = UINT32_MAX;

  // BFS order per component so each step has mapped neighbours to check.
  static std::vector<NodeId> connectivity_order(const LabeledGraph& g) {
    std::vector<NodeId> order;
    std::vector<bool> seen(g.node_count(), false);
    std::deque<NodeId> queue;
    for (NodeId s = 0; s < g.node_count(); ++s) {
      if (seen[s]) continue;
      seen[s] = true;
      queue.push_back(s);
      while (!queue.empty()) {
        NodeId v = queue.front();
        queue.pop_front();
        order.push_back(v);
        for (const auto& adj : g.neighbors(v)) {
          if (!seen[adj.node]) {
            seen[adj.node] = true;
            queue.push_back(adj.node);
          }
        }
      }
    }
    return order;
  }

  bool consistent(NodeId v, NodeId w) const {
    if (from_colors_[v] != to_colors_[w]) return false;
    if (from_.label(v) != to_.label(w) || from_.degree(v) != to_.degree(w)) return false;
    for (NodeId u = 0; u < from_.node_count(); ++u) {
      if (mapping_[u] == kFree) continue;
      const Edge* e1 = from_.find_edge(v, u);
      const Edge* e2 = to_.find_edge(w, mapping_[u]);
      if ((e1 == nullptr) != (e2 == nullptr)) return false;
      if (e1 && e1->label != e2->label) return false;
    }
    return true;
  }

  bool extend(std::size_t depth) {
    if (depth == order_.size()) return true;
    const NodeId v = order_[depth];
    for (NodeId w = 0; w < to_.node_count(); ++w) {
      if (used_[w] || !consistent(v, w)) continue;
      mapping_[v] = w;
      used_[w] = true;
      if (extend(depth + 1)) return true;
      mapping_[v] = kFree;
      used_[w] = false;
    }
    return false;
  }

  const LabeledGraph& from_;
  const LabeledGraph& to_;
  std::vector<std::uint64_t> from_colors_;
  std::vector<std::uint64_t> to_colors_;
  std::vector<NodeId> order_;
  std::vector<NodeId> mapping_;
  std::vector<bool> used_;
};

}  // namespace detail

/// Exact label-, edge-label- and mark-preserving isomorphism from `from` onto
/// `to`, as mapping[from node] = to node. Backtracking over refined colour
/// classes; the first mapping in node order is returned.
inline std::optional<std::vector<NodeId>> find_isomorphism(const LabeledGraph& from,
                                                           std::span<const std::uint64_t> from_marks,
                                                           const LabeledGraph& to,
                                                           std::span<const std::uint64_t> to_marks) {
  return detail::IsomorphismSearch(from, from_marks, to, to_marks).run();
}

inline bool isomorphic(const LabeledGraph& a, std::span<const std::uint64_t> a_marks, const LabeledGraph& b,
                       std::span<const std::uint64_t> b_marks) {
  return find_isomorphism(a, a_marks, b, b_marks).has_value();
}

inline bool isomorphic(const LabeledGraph& a, const LabeledGraph& b) {
  const std::vector<std::uint64_t> ma(a.node_count(), hash_string("")), mb(b.node_count(), hash_string(""));
  return isomorphic(a, ma, b, mb);
}

}  // namespace grammargen

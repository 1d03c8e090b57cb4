#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "grammargen/graph.hpp"
#include "grammargen/hash.hpp"

namespace grammargen {

/// Hashes string marks the way certificate() expects them.
inline std::vector<std::uint64_t> hash_marks(std::span<const std::string> marks) {
  std::vector<std::uint64_t> out;
  out.reserve(marks.size());
  for (const auto& m : marks) out.push_back(hash_string(m));
  return out;
}

namespace detail {

inline std::size_t count_distinct(std::vector<std::uint64_t> v) {
  std::sort(v.begin(), v.end());
  return static_cast<std::size_t>(std::unique(v.begin(), v.end()) - v.begin());
}

}  // namespace detail

/// Stable colour refinement. The initial colour folds in the node label, the
/// mark, the degree and the number of triangles through the node, which
/// separates regular graphs plain 1-WL cannot (a hexagon vs two triangles).
/// Refinement runs until the number of colour classes stops growing, at most
/// n rounds.
inline std::vector<std::uint64_t> refine_colors(const LabeledGraph& g, std::span<const std::uint64_t> marks) {
  const std::size_t n = g.node_count();
  if (marks.size() != n) throw Error(ErrorKind::invalid_argument, "marks size does not match node count");

  std::vector<std::uint64_t> edge_hash(g.edge_count());
  for (std::uint32_t e = 0; e < g.edge_count(); ++e) edge_hash[e] = hash_string(g.edge(e).label);

  std::vector<std::uint64_t> colors(n);
  for (NodeId v = 0; v < n; ++v) {
    std::uint64_t triangles = 0;
    const auto nbrs = g.neighbors(v);
    for (std::size_t i = 0; i < nbrs.size(); ++i)
      for (std::size_t j = i + 1; j < nbrs.size(); ++j)
        if (g.has_edge(nbrs[i].node, nbrs[j].node)) ++triangles;
    colors[v] = Fnv1a()
                    .str(g.label(v))
                    .u64(marks[v])
                    .u64(nbrs.size())
                    .u64(triangles)
                    .digest();
  }

  std::size_t classes = detail::count_distinct(colors);
  std::vector<std::uint64_t> next(n);
  std::vector<std::uint64_t> bag;
  for (std::size_t round = 0; round < n; ++round) {
    for (NodeId v = 0; v < n; ++v) {
      bag.clear();
      for (const auto& adj : g.neighbors(v))
        bag.push_back(Fnv1a().u64(edge_hash[adj.edge]).u64(colors[adj.node]).digest());
      std::sort(bag.begin(), bag.end());
      Fnv1a h;
      h.u64(colors[v]);
      for (auto x : bag) h.u64(x);
      next[v] = h.digest();
    }
    colors.swap(next);
    const std::size_t refined = detail::count_distinct(colors);
    if (refined <= classes) break;
    classes = refined;
  }
  return colors;
}

/// Order-independent digest of a labeled graph with hashed per-node marks.
/// Equal for isomorphic inputs; different digests prove non-isomorphism.
inline Certificate certificate(const LabeledGraph& g, std::span<const std::uint64_t> marks) {
  const auto colors = refine_colors(g, marks);

  std::vector<std::uint64_t> node_part(colors);
  std::sort(node_part.begin(), node_part.end());

  std::vector<std::uint64_t> edge_part;
  edge_part.reserve(g.edge_count());
  for (const auto& e : g.edges()) {
    const auto [lo, hi] = std::minmax(colors[e.a], colors[e.b]);
    edge_part.push_back(Fnv1a().u64(lo).u64(hi).str(e.label).digest());
  }
  std::sort(edge_part.begin(), edge_part.end());

  std::size_t component_count = 0;
  const auto comp = connected_components(g, &component_count);
  std::vector<std::uint64_t> sizes(component_count, 0);
  for (auto c : comp) ++sizes[c];
  std::sort(sizes.begin(), sizes.end());

  Fnv1a h;
  h.u64(g.node_count()).u64(g.edge_count());
  for (auto x : node_part) h.u64(x);
  for (auto x : edge_part) h.u64(x);
  for (auto x : sizes) h.u64(x);
  return Certificate{h.digest()};
}

inline Certificate certificate(const LabeledGraph& g) {
  const std::vector<std::uint64_t> marks(g.node_count(), hash_string(""));
  return certificate(g, marks);
}

/// Marks given per node id; nodes without an entry get the empty mark.
inline Certificate certificate(const LabeledGraph& g, const std::map<NodeId, std::string>& marks) {
  std::vector<std::uint64_t> hashed(g.node_count(), hash_string(""));
  for (const auto& [v, m] : marks) {
    require_node(g, v);
    hashed[v] = hash_string(m);
  }
  return certificate(g, hashed);
}

}  // namespace grammargen

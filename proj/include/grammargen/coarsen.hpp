#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "grammargen/certificate.hpp"
#include "grammargen/graph.hpp"
#include "grammargen/rna.hpp"

namespace grammargen {

/// Quotient of a base graph by its cid groups.
struct CoarseningResult {
  LabeledGraph coarse;
  std::vector<NodeId> base_to_coarse;
  std::vector<std::vector<NodeId>> coarse_to_base;
};

using GroupLabeler = std::function<std::string(const LabeledGraph&, std::span<const NodeId>)>;

/// One coarse node per distinct cid (ascending cid order), labelled by
/// `labeler`; coarse nodes are adjacent iff some base edge joins their groups.
/// Covers both edge contraction and contraction of non-adjacent vertices.
inline CoarseningResult contract(const LabeledGraph& g, const GroupLabeler& labeler) {
  std::map<std::uint32_t, NodeId> slot;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const auto& cid = g.node(v).cid;
    if (!cid) throw Error(ErrorKind::invalid_argument, "node " + std::to_string(v) + " has no cid");
    slot.emplace(*cid, 0);
  }
  NodeId next = 0;
  for (auto& [cid, index] : slot) index = next++;

  CoarseningResult out;
  out.base_to_coarse.resize(g.node_count());
  out.coarse_to_base.resize(slot.size());
  for (NodeId v = 0; v < g.node_count(); ++v) {
    const NodeId c = slot.at(*g.node(v).cid);
    out.base_to_coarse[v] = c;
    out.coarse_to_base[c].push_back(v);
  }
  for (const auto& group : out.coarse_to_base) out.coarse.add_node(labeler(g, group));
  for (const auto& e : g.edges()) {
    const NodeId ca = out.base_to_coarse[e.a], cb = out.base_to_coarse[e.b];
    if (ca != cb && !out.coarse.has_edge(ca, cb)) out.coarse.add_edge(ca, cb, "");
  }
  return out;
}

/// Labeler that concatenates the sorted base labels of a group.
inline std::string join_sorted_labels(const LabeledGraph& g, std::span<const NodeId> group) {
  std::vector<std::string> labels;
  for (NodeId v : group) labels.push_back(g.label(v));
  std::sort(labels.begin(), labels.end());
  std::string out;
  for (const auto& l : labels) out += l;
  return out;
}

// ---------------------------------------------------------------------------
// RNA structural elements

struct RnaElement {
  char kind = 'D';  // S)tem, H)airpin, I)nterior loop or bulge, M)ultiloop, D)angling end
  std::vector<std::size_t> positions;
};

/// Decomposes a non-crossing structure into stems (maximal runs of stacked
/// pairs) and loops. A loop is grouped as a whole, even when its unpaired
/// stretches are not contiguous: closed by one pair it is a hairpin, by two
/// an interior loop, by three or more a multiloop. Unpaired 5'/3' tails are
/// dangling ends; unpaired linkers between top-level stems form one
/// exterior M group. Elements are ordered by their first position.
inline std::vector<RnaElement> rna_elements(const RnaStructure& s) {
  const std::size_t n = s.sequence.size();
  const auto partner = partner_table(s);

  // Group keys: stems are (0, stem index), enclosed loops (1, opener),
  // exterior linker (2, 0), 5' tail (3, 0), 3' tail (3, 1).
  std::vector<std::pair<int, long>> key(n);

  long stems = 0;
  std::vector<long> stem_of(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (partner[i] <= static_cast<long>(i)) continue;
    const auto j = static_cast<std::size_t>(partner[i]);
    if (i > 0 && j + 1 < n && partner[i - 1] == static_cast<long>(j + 1)) stem_of[i] = stem_of[i - 1];
    else stem_of[i] = stems++;
    stem_of[j] = stem_of[i];
  }

  std::vector<long> enclosing(n, -1);
  std::map<long, int> branches;
  std::vector<std::size_t> open;
  for (std::size_t k = 0; k < n; ++k) {
    const long top = open.empty() ? -1 : static_cast<long>(open.back());
    if (partner[k] > static_cast<long>(k)) {
      enclosing[k] = top;
      ++branches[top];
      open.push_back(k);
    } else if (partner[k] >= 0) {
      open.pop_back();
    } else {
      enclosing[k] = top;
    }
  }

  long first_paired = -1, last_paired = -1;
  for (std::size_t k = 0; k < n; ++k) {
    if (partner[k] < 0) continue;
    if (first_paired < 0) first_paired = static_cast<long>(k);
    last_paired = static_cast<long>(k);
  }

  std::map<std::pair<int, long>, char> kind_of;
  for (std::size_t k = 0; k < n; ++k) {
    const auto pos = static_cast<long>(k);
    char kind;
    if (partner[k] >= 0) {
      key[k] = {0, stem_of[k]};
      kind = 'S';
    } else if (enclosing[k] >= 0) {
      key[k] = {1, enclosing[k]};
      const int inner = branches[enclosing[k]];
      kind = inner == 0 ? 'H' : inner == 1 ? 'I' : 'M';
    } else if (first_paired < 0 || pos < first_paired) {
      key[k] = {3, 0};
      kind = 'D';
    } else if (pos > last_paired) {
      key[k] = {3, 1};
      kind = 'D';
    } else {
      key[k] = {2, 0};
      kind = 'M';
    }
    kind_of[key[k]] = kind;
  }

  std::vector<RnaElement> out;
  std::map<std::pair<int, long>, std::size_t> element_index;
  for (std::size_t k = 0; k < n; ++k) {
    auto [it, inserted] = element_index.emplace(key[k], out.size());
    if (inserted) out.push_back(RnaElement{kind_of[key[k]], {}});
    out[it->second].positions.push_back(k);
  }
  return out;
}

/// Nucleotide graph of a valid structure with one cid per structural
/// element (cid = element index in rna_elements order).
inline LabeledGraph annotate_rna(const RnaStructure& s, const RnaRules& rules = {}) {
  validate(s, rules);
  LabeledGraph g = rna_graph(s);
  const auto elements = rna_elements(s);
  for (std::uint32_t c = 0; c < elements.size(); ++c)
    for (auto pos : elements[c].positions) g.set_cid(static_cast<NodeId>(pos), c);
  return g;
}

/// Labels a cid group of an RNA graph with its element kind (S, H, I, M, D).
inline GroupLabeler rna_element_labeler() {
  return [](const LabeledGraph& g, std::span<const NodeId> group) -> std::string {
    if (group.empty()) return "D";
    const auto reading = read_rna_graph(g);
    std::vector<std::size_t> position(g.node_count());
    for (std::size_t k = 0; k < reading.order.size(); ++k) position[reading.order[k]] = k;
    for (const auto& el : rna_elements(reading.structure))
      if (std::find(el.positions.begin(), el.positions.end(), position[group.front()]) != el.positions.end())
        return std::string(1, el.kind);
    return "D";
  };
}

// ---------------------------------------------------------------------------
// Molecular rings

/// Edges that lie on no cycle (iterative Tarjan low-link).
inline std::vector<bool> bridge_edges(const LabeledGraph& g) {
  const std::size_t n = g.node_count();
  std::vector<bool> bridge(g.edge_count(), false);
  std::vector<int> disc(n, -1), low(n, 0);
  int timer = 0;
  struct Frame {
    NodeId v;
    std::uint32_t parent_edge;
    std::size_t next;
  };
  std::vector<Frame> stack;
  for (NodeId s = 0; s < n; ++s) {
    if (disc[s] != -1) continue;
    disc[s] = low[s] = timer++;
    stack.push_back({s, UINT32_MAX, 0});
    while (!stack.empty()) {
      Frame& f = stack.back();
      const auto nbrs = g.neighbors(f.v);
      if (f.next < nbrs.size()) {
        const auto adj = nbrs[f.next++];
        if (adj.edge == f.parent_edge) continue;
        if (disc[adj.node] == -1) {
          disc[adj.node] = low[adj.node] = timer++;
          stack.push_back({adj.node, adj.edge, 0});
        } else {
          low[f.v] = std::min(low[f.v], disc[adj.node]);
        }
      } else {
        const Frame done = f;
        stack.pop_back();
        if (!stack.empty()) {
          const NodeId parent = stack.back().v;
          low[parent] = std::min(low[parent], low[done.v]);
          if (low[done.v] > disc[parent]) bridge[done.parent_edge] = true;
        }
      }
    }
  }
  return bridge;
}

/// Assigns one cid per fused ring system (2-edge-connected block with at
/// least three atoms) and one cid per acyclic atom, numbered by first atom.
inline LabeledGraph annotate_molecule_rings(const LabeledGraph& g) {
  const auto bridge = bridge_edges(g);
  const std::size_t n = g.node_count();
  constexpr std::uint32_t kNone = UINT32_MAX;
  std::vector<std::uint32_t> cid(n, kNone);
  std::uint32_t next = 0;
  std::vector<NodeId> stack;
  for (NodeId s = 0; s < n; ++s) {
    if (cid[s] != kNone) continue;
    cid[s] = next;
    stack.push_back(s);
    while (!stack.empty()) {
      const NodeId v = stack.back();
      stack.pop_back();
      for (const auto& adj : g.neighbors(v)) {
        if (bridge[adj.edge] || cid[adj.node] != kNone) continue;
        cid[adj.node] = next;
        stack.push_back(adj.node);
      }
    }
    ++next;
  }
  LabeledGraph out = g;
  for (NodeId v = 0; v < n; ++v) out.set_cid(v, cid[v]);
  return out;
}

/// Ring groups get the hex certificate of their induced subgraph; single
/// atoms keep their own label.
inline std::string ring_label(const LabeledGraph& g, std::span<const NodeId> group) {
  if (group.size() == 1) return g.label(group.front());
  return certificate(induced_subgraph(g, group).graph).hex();
}

// ---------------------------------------------------------------------------

/// Domain coarsener: annotates a base graph with cids in place (node ids are
/// unchanged) and contracts it.
class Coarsener {
 public:
  enum class Kind { rna, molecule };

  struct Coarsened {
    LabeledGraph annotated;
    CoarseningResult result;
  };

  static Coarsener rna() { return Coarsener(Kind::rna); }
  static Coarsener molecule() { return Coarsener(Kind::molecule); }

  static Coarsener from_name(std::string_view name) {
    if (name == "rna") return rna();
    if (name == "mol") return molecule();
    throw Error(ErrorKind::invalid_argument, "unknown coarsener '" + std::string(name) + "'");
  }

  Kind kind() const noexcept { return kind_; }
  std::string_view name() const noexcept { return kind_ == Kind::rna ? "rna" : "mol"; }

  Coarsened coarsen(const LabeledGraph& g) const {
    if (kind_ == Kind::molecule) {
      Coarsened out{annotate_molecule_rings(g), {}};
      out.result = contract(out.annotated, ring_label);
      return out;
    }
    const auto reading = read_rna_graph(g);
    const auto elements = rna_elements(reading.structure);
    Coarsened out{g, {}};
    std::vector<std::string> labels;
    for (std::uint32_t c = 0; c < elements.size(); ++c) {
      labels.emplace_back(1, elements[c].kind);
      for (auto pos : elements[c].positions) out.annotated.set_cid(reading.order[pos], c);
    }
    out.result = contract(out.annotated, [&labels](const LabeledGraph& a, std::span<const NodeId> group) {
      return labels.at(*a.node(group.front()).cid);
    });
    return out;
  }

 private:
  explicit Coarsener(Kind kind) : kind_(kind) {}

  Kind kind_;
};

}  // namespace grammargen

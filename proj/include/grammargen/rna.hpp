#pragma once

#include <algorithm>
#include <compare>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "grammargen/error.hpp"
#include "grammargen/graph.hpp"

namespace grammargen {

inline constexpr std::string_view kBackboneLabel = "b";
inline constexpr std::string_view kPairLabel = "p";

struct RnaRules {
  std::size_t min_loop = 3;
  bool allow_wobble = true;
};

struct BasePair {
  std::size_t i = 0;
  std::size_t j = 0;

  auto operator<=>(const BasePair&) const = default;
};

/// Sequence over ACGU plus a set of base pairs (i < j), kept sorted.
struct RnaStructure {
  std::string sequence;
  std::vector<BasePair> pairs;

  bool operator==(const RnaStructure&) const = default;
};

inline bool is_nucleotide(char c) noexcept { return c == 'A' || c == 'C' || c == 'G' || c == 'U'; }

inline bool complementary(char a, char b, bool allow_wobble) noexcept {
  if (a > b) std::swap(a, b);
  if (a == 'A' && b == 'U') return true;
  if (a == 'C' && b == 'G') return true;
  return allow_wobble && a == 'G' && b == 'U';
}

inline void validate_sequence(std::string_view seq) {
  for (std::size_t k = 0; k < seq.size(); ++k)
    if (!is_nucleotide(seq[k]))
      throw Error(ErrorKind::validation,
                  "invalid nucleotide '" + std::string(1, seq[k]) + "' at position " + std::to_string(k));
}

/// partner[k] is the index paired with k, or -1.
inline std::vector<long> partner_table(const RnaStructure& s) {
  std::vector<long> partner(s.sequence.size(), -1);
  for (const auto& p : s.pairs) {
    partner[p.i] = static_cast<long>(p.j);
    partner[p.j] = static_cast<long>(p.i);
  }
  return partner;
}

/// Topology only: indices in range, i < j, each index in at most one pair,
/// no crossing pairs.
inline void validate_topology(const RnaStructure& s) {
  const std::size_t n = s.sequence.size();
  std::vector<bool> used(n, false);
  for (const auto& p : s.pairs) {
    if (p.i >= p.j || p.j >= n)
      throw Error(ErrorKind::validation, "pair (" + std::to_string(p.i) + "," + std::to_string(p.j) + ") out of range");
    if (used[p.i] || used[p.j])
      throw Error(ErrorKind::validation, "position paired twice in (" + std::to_string(p.i) + "," + std::to_string(p.j) + ")");
    used[p.i] = used[p.j] = true;
  }
  std::vector<BasePair> sorted(s.pairs);
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> open;
  for (const auto& p : sorted) {
    while (!open.empty() && open.back() < p.i) open.pop_back();
    if (!open.empty() && p.j > open.back())
      throw Error(ErrorKind::validation, "crossing pair (" + std::to_string(p.i) + "," + std::to_string(p.j) + ")");
    open.push_back(p.j);
  }
}

inline void validate(const RnaStructure& s, const RnaRules& rules = {}) {
  validate_sequence(s.sequence);
  validate_topology(s);
  for (const auto& p : s.pairs) {
    if (!complementary(s.sequence[p.i], s.sequence[p.j], rules.allow_wobble))
      throw Error(ErrorKind::validation, std::string("non-complementary pair ") + s.sequence[p.i] + "-" +
                                             s.sequence[p.j] + " at (" + std::to_string(p.i) + "," +
                                             std::to_string(p.j) + ")");
    if (p.j - p.i <= rules.min_loop)
      throw Error(ErrorKind::validation, "pair (" + std::to_string(p.i) + "," + std::to_string(p.j) +
                                             ") closes a loop shorter than " + std::to_string(rules.min_loop));
  }
}

inline std::string to_dot_bracket(const RnaStructure& s) {
  std::string out(s.sequence.size(), '.');
  for (const auto& p : s.pairs) {
    out[p.i] = '(';
    out[p.j] = ')';
  }
  return out;
}

/// Stack-matches brackets; rejects unbalanced strings and stray characters.
/// Does not apply complementarity or loop-length rules.
inline RnaStructure structure_from_dot_bracket(std::string_view sequence, std::string_view brackets) {
  if (sequence.size() != brackets.size())
    throw Error(ErrorKind::validation, "sequence length " + std::to_string(sequence.size()) +
                                           " does not match structure length " + std::to_string(brackets.size()));
  RnaStructure s;
  s.sequence.assign(sequence);
  std::vector<std::size_t> stack;
  for (std::size_t k = 0; k < brackets.size(); ++k) {
    switch (brackets[k]) {
      case '(':
        stack.push_back(k);
        break;
      case ')':
        if (stack.empty()) throw Error(ErrorKind::validation, "unbalanced ')' at position " + std::to_string(k));
        s.pairs.push_back({stack.back(), k});
        stack.pop_back();
        break;
      case '.':
        break;
      default:
        throw Error(ErrorKind::validation,
                    "invalid structure character '" + std::string(1, brackets[k]) + "' at position " + std::to_string(k));
    }
  }
  if (!stack.empty()) throw Error(ErrorKind::validation, "unbalanced '(' at position " + std::to_string(stack.back()));
  std::sort(s.pairs.begin(), s.pairs.end());
  return s;
}

/// Nucleotide graph: node k is position k, backbone edges (k,k+1) labelled
/// "b", pair edges labelled "p". No cids.
inline LabeledGraph rna_graph(const RnaStructure& s) {
  LabeledGraph g;
  for (char c : s.sequence) g.add_node(std::string(1, c));
  for (std::size_t k = 0; k + 1 < s.sequence.size(); ++k)
    g.add_edge(static_cast<NodeId>(k), static_cast<NodeId>(k + 1), std::string(kBackboneLabel));
  for (const auto& p : s.pairs) g.add_edge(static_cast<NodeId>(p.i), static_cast<NodeId>(p.j), std::string(kPairLabel));
  return g;
}

struct RnaReading {
  RnaStructure structure;
  std::vector<NodeId> order;  // order[position] = node id
};

/// Reads sequence and pairs back from a nucleotide graph. The backbone ("b"
/// edges) must be a simple path through every node; it is read starting from
/// the endpoint with the smaller node id. Pair edges must form a
/// non-crossing matching. Chemistry rules are left to validate().
inline RnaReading read_rna_graph(const LabeledGraph& g) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::validation, "rna graph: " + msg); };
  const std::size_t n = g.node_count();
  if (n == 0) fail("empty graph");

  std::vector<std::vector<NodeId>> backbone(n);
  std::vector<long> partner(n, -1);
  std::size_t backbone_edges = 0;
  for (const auto& e : g.edges()) {
    if (e.label == kBackboneLabel) {
      backbone[e.a].push_back(e.b);
      backbone[e.b].push_back(e.a);
      ++backbone_edges;
    } else if (e.label == kPairLabel) {
      if (partner[e.a] != -1 || partner[e.b] != -1) fail("nucleotide with more than one pair edge");
      partner[e.a] = e.b;
      partner[e.b] = e.a;
    } else {
      fail("unexpected edge label '" + e.label + "'");
    }
  }
  if (backbone_edges != n - 1) fail("backbone is not a simple path");

  NodeId start = 0;
  bool found = n == 1;
  for (NodeId v = 0; v < n && !found; ++v) {
    if (backbone[v].size() > 2) fail("backbone branches at node " + std::to_string(v));
    if (backbone[v].size() == 1) {
      start = v;
      found = true;
    }
  }
  if (!found) fail("backbone is not a simple path");

  RnaReading out;
  out.order.reserve(n);
  std::vector<bool> seen(n, false);
  NodeId prev = start, cur = start;
  seen[start] = true;
  out.order.push_back(start);
  while (true) {
    if (backbone[cur].size() > 2) fail("backbone branches at node " + std::to_string(cur));
    NodeId next = cur;
    for (NodeId w : backbone[cur])
      if (w != prev && !seen[w]) next = w;
    if (next == cur) break;
    seen[next] = true;
    out.order.push_back(next);
    prev = cur;
    cur = next;
  }
  if (out.order.size() != n) fail("backbone is not a simple path");

  std::vector<std::size_t> position(n);
  for (std::size_t k = 0; k < n; ++k) position[out.order[k]] = k;
  out.structure.sequence.reserve(n);
  for (NodeId v : out.order) {
    const auto& label = g.label(v);
    if (label.size() != 1 || !is_nucleotide(label[0])) fail("node label '" + label + "' is not a nucleotide");
    out.structure.sequence.push_back(label[0]);
  }
  for (NodeId v = 0; v < n; ++v) {
    if (partner[v] > static_cast<long>(v)) {
      auto [i, j] = std::minmax(position[v], position[static_cast<NodeId>(partner[v])]);
      out.structure.pairs.push_back({i, j});
    }
  }
  std::sort(out.structure.pairs.begin(), out.structure.pairs.end());
  try {
    validate_topology(out.structure);
  } catch (const Error& e) {
    fail(e.what());
  }
  return out;
}

}  // namespace grammargen

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "grammargen/certificate.hpp"
#include "grammargen/graph.hpp"

namespace grammargen {

struct KernelParams {
  unsigned max_radius = 3;
  unsigned max_distance = 3;
  unsigned feature_bits = 16;

  void validate() const {
    if (feature_bits < 8 || feature_bits > 30)
      throw Error(ErrorKind::invalid_argument, "feature_bits must lie in [8, 30]");
  }

  std::uint32_t dimension() const noexcept { return std::uint32_t{1} << feature_bits; }
};

/// Sparse feature vector, entries sorted by index, no explicit zeros.
struct SparseVector {
  std::vector<std::pair<std::uint32_t, double>> entries;

  bool operator==(const SparseVector&) const = default;

  double squared_norm() const noexcept {
    double s = 0.0;
    for (const auto& [i, w] : entries) s += w * w;
    return s;
  }
};

inline double dot(const SparseVector& a, const SparseVector& b) noexcept {
  double s = 0.0;
  auto ia = a.entries.begin(), ib = b.entries.begin();
  while (ia != a.entries.end() && ib != b.entries.end()) {
    if (ia->first < ib->first) ++ia;
    else if (ib->first < ia->first) ++ib;
    else {
      s += ia->second * ib->second;
      ++ia;
      ++ib;
    }
  }
  return s;
}

inline SparseVector scaled(const SparseVector& v, double factor) {
  SparseVector out = v;
  for (auto& [i, w] : out.entries) w *= factor;
  return out;
}

/// Pairs of rooted neighbourhood subgraphs. For every unordered node pair
/// (u, v), u == v included, at distance d <= max_distance and every radius
/// r <= max_radius, the feature hash(r, d, cert_r(u), cert_r(v)) is counted
/// once; cert_r(u) is the certificate of the radius-r ball around u with
/// nodes marked by their distance to u. The vector is scaled to unit norm.
inline SparseVector vectorize(const LabeledGraph& g, const KernelParams& p = {}) {
  p.validate();
  if (g.empty()) throw Error(ErrorKind::invalid_argument, "cannot vectorize an empty graph");
  const std::size_t n = g.node_count();
  const int reach = static_cast<int>(std::max(p.max_radius, p.max_distance));
  const std::uint32_t mask = p.dimension() - 1;

  std::vector<std::vector<int>> dist(n);
  for (NodeId v = 0; v < n; ++v) dist[v] = distances_from(g, v, reach);

  // rooted[v][r]
  std::vector<std::vector<std::uint64_t>> rooted(n, std::vector<std::uint64_t>(p.max_radius + 1));
  std::vector<NodeId> ball;
  std::vector<std::uint64_t> marks;
  for (NodeId v = 0; v < n; ++v) {
    for (unsigned r = 0; r <= p.max_radius; ++r) {
      ball.clear();
      for (NodeId u = 0; u < n; ++u)
        if (dist[v][u] != kUnreached && dist[v][u] <= static_cast<int>(r)) ball.push_back(u);
      const auto sub = induced_subgraph(g, ball);
      marks.clear();
      for (NodeId u : sub.origin) marks.push_back(Fnv1a().u64(static_cast<std::uint64_t>(dist[v][u])).digest());
      rooted[v][r] = certificate(sub.graph, marks).value;
    }
  }

  std::map<std::uint32_t, double> counts;
  for (NodeId u = 0; u < n; ++u) {
    for (NodeId v = u; v < n; ++v) {
      const int d = dist[u][v];
      if (d == kUnreached || d > static_cast<int>(p.max_distance)) continue;
      for (unsigned r = 0; r <= p.max_radius; ++r) {
        const auto [lo, hi] = std::minmax(rooted[u][r], rooted[v][r]);
        const auto index = static_cast<std::uint32_t>(
            Fnv1a().u64(r).u64(static_cast<std::uint64_t>(d)).u64(lo).u64(hi).digest() & mask);
        counts[index] += 1.0;
      }
    }
  }

  SparseVector out;
  out.entries.assign(counts.begin(), counts.end());
  const double norm = std::sqrt(out.squared_norm());
  for (auto& [i, w] : out.entries) w /= norm;
  return out;
}

inline std::vector<SparseVector> vectorize_all(std::span<const LabeledGraph> graphs, const KernelParams& p = {}) {
  std::vector<SparseVector> out;
  out.reserve(graphs.size());
  for (const auto& g : graphs) out.push_back(vectorize(g, p));
  return out;
}

/// Normalized kernel: dot product of unit feature vectors, in [0, 1].
inline double kernel(const LabeledGraph& a, const LabeledGraph& b, const KernelParams& p = {}) {
  return dot(vectorize(a, p), vectorize(b, p));
}

namespace detail {

inline std::vector<double> dense_sum(std::span<const SparseVector> set, std::uint32_t dimension) {
  std::vector<double> sum(dimension, 0.0);
  for (const auto& v : set)
    for (const auto& [i, w] : v.entries) {
      if (i >= dimension) throw Error(ErrorKind::invalid_argument, "feature index outside dimension");
      sum[i] += w;
    }
  return sum;
}

inline double dense_dot(const std::vector<double>& a, const std::vector<double>& b) noexcept {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace detail

/// K(G,R) / sqrt(K(G,G) K(R,R)) with K(G,R) the sum of k(g,r) over all
/// pairs, computed through summed feature vectors.
inline double set_similarity(std::span<const SparseVector> gen, std::span<const SparseVector> real,
                             std::uint32_t dimension) {
  if (gen.empty() || real.empty()) throw Error(ErrorKind::invalid_argument, "set similarity of an empty set");
  const auto sg = detail::dense_sum(gen, dimension);
  const auto sr = detail::dense_sum(real, dimension);
  const double cross = detail::dense_dot(sg, sr);
  const double self = detail::dense_dot(sg, sg) * detail::dense_dot(sr, sr);
  if (self <= 0.0) return 0.0;
  return cross / std::sqrt(self);
}

inline double set_similarity(std::span<const LabeledGraph> gen, std::span<const LabeledGraph> real,
                             const KernelParams& p = {}) {
  if (gen.empty() || real.empty()) throw Error(ErrorKind::invalid_argument, "set similarity of an empty set");
  const auto vg = vectorize_all(gen, p);
  const auto vr = vectorize_all(real, p);
  return set_similarity(vg, vr, p.dimension());
}

struct Diversity {
  double intdiv1 = 0.0;
  double intdiv2 = 0.0;
};

/// IntDiv1 = 1 - mean k(g_i, g_j) and IntDiv2 = 1 - sqrt(mean k^2), over all
/// ordered pairs including i == j.
inline Diversity internal_diversity(std::span<const SparseVector> set) {
  if (set.empty()) throw Error(ErrorKind::invalid_argument, "internal diversity of an empty set");
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    for (std::size_t j = 0; j < set.size(); ++j) {
      const double k = i == j ? 1.0 : dot(set[i], set[j]);
      sum += k;
      sum_sq += k * k;
    }
  }
  const double pairs = static_cast<double>(set.size() * set.size());
  return {std::max(0.0, 1.0 - sum / pairs), std::max(0.0, 1.0 - std::sqrt(sum_sq / pairs))};
}

inline Diversity internal_diversity(std::span<const LabeledGraph> set, const KernelParams& p = {}) {
  const auto vs = vectorize_all(set, p);
  return internal_diversity(vs);
}

/// One "index:weight" line in SVM-light order (ascending index).
inline std::string to_svmlight(const SparseVector& v) {
  std::ostringstream out;
  out.precision(17);
  bool first = true;
  for (const auto& [i, w] : v.entries) {
    if (!first) out << ' ';
    out << i << ':' << w;
    first = false;
  }
  return out.str();
}

}  // namespace grammargen

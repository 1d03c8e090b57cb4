#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "grammargen/certificate.hpp"
#include "grammargen/coarsen.hpp"
#include "grammargen/graph.hpp"
#include "grammargen/hash.hpp"
#include "grammargen/isomorphism.hpp"
#include "grammargen/rng.hpp"

namespace grammargen {

/// Core radius R, interface thickness T (measured on the coarse graph when
/// coarsened) and base-level thickness B (coarsened mode only).
struct CipParams {
  unsigned radius = 0;
  unsigned thickness = 1;
  unsigned base_thickness = 1;
  bool coarsened = false;

  auto operator<=>(const CipParams&) const = default;

  void validate() const {
    if (thickness < 1) throw Error(ErrorKind::invalid_argument, "interface thickness must be >= 1");
    if (coarsened && base_thickness < 1) throw Error(ErrorKind::invalid_argument, "base thickness must be >= 1");
  }
};

/// Core-interface pair. `fragment` holds the core nodes first, then the
/// interface nodes, with the edges the source graph induces on them.
/// Every fragment node carries a mark: "c" for core nodes, "i<d>" for flat
/// interface nodes at distance d from the core, and "i<d>/<cd>/<label>" for
/// base interface nodes in coarsened mode (cd and label describe the coarse
/// node the interface node contracts to).
struct Cip {
  LabeledGraph fragment;
  std::size_t core_size = 0;
  NodeId root = 0;
  std::vector<std::string> marks;
  Certificate interface_cert;
  Certificate core_cert;
  CipParams params;

  std::size_t interface_size() const noexcept { return fragment.node_count() - core_size; }
};

/// A CIP located in a graph: origin[fragment node] is the node id there.
struct CipSite {
  Cip cip;
  std::vector<NodeId> origin;
};

namespace detail {

inline constexpr std::string_view kCoreMark = "c";

/// Interface part of a CIP as its own graph, with hashed marks.
inline std::pair<LabeledGraph, std::vector<std::uint64_t>> interface_graph(const Cip& cip) {
  std::vector<NodeId> keep;
  for (auto v = static_cast<NodeId>(cip.core_size); v < cip.fragment.node_count(); ++v) keep.push_back(v);
  auto sub = induced_subgraph(cip.fragment, keep);
  std::vector<std::uint64_t> marks;
  for (NodeId v : sub.origin) marks.push_back(hash_string(cip.marks[v]));
  return {std::move(sub.graph), std::move(marks)};
}

inline CipSite build_site(const LabeledGraph& g, std::span<const NodeId> core, std::span<const NodeId> iface,
                          const std::vector<std::string>& iface_marks, NodeId root) {
  CipSite site;
  constexpr NodeId kAbsent = UINT32_MAX;
  std::vector<NodeId> index(g.node_count(), kAbsent);
  auto add = [&](NodeId v, std::string mark) {
    index[v] = site.cip.fragment.add_node(g.label(v));
    site.origin.push_back(v);
    site.cip.marks.push_back(std::move(mark));
  };
  for (NodeId v : core) add(v, std::string(kCoreMark));
  for (std::size_t k = 0; k < iface.size(); ++k) add(iface[k], iface_marks[k]);
  for (const auto& e : g.edges())
    if (index[e.a] != kAbsent && index[e.b] != kAbsent) site.cip.fragment.add_edge(index[e.a], index[e.b], e.label);
  site.cip.core_size = core.size();
  site.cip.root = index[root];
  return site;
}

inline Certificate core_certificate(const Cip& cip) {
  const auto whole = certificate(cip.fragment, hash_marks(cip.marks));
  return Certificate{Fnv1a().str("core").u64(whole.value).u64(cip.interface_cert.value).digest()};
}

}  // namespace detail

/// Extracts the CIP rooted at `root`. Flat mode (coarse == nullptr): core is
/// the radius-R ball, interface the nodes at distance R+1..R+T. Coarsened
/// mode: `root` is a coarse node; the core is every base node contracted
/// into the radius-R coarse ball, the base interface is the base nodes within
/// distance B of that core, and the coarse interface is the coarse nodes at
/// coarse distance R+1..R+T. The interface certificate then requires both
/// levels to match.
inline CipSite extract_cip(const LabeledGraph& g, const CoarseningResult* coarse, NodeId root, const CipParams& p) {
  p.validate();
  if (!coarse) {
    if (p.coarsened) throw Error(ErrorKind::invalid_argument, "coarsened CIP parameters need a coarsening");
    require_node(g, root);
    const auto dist = distances_from(g, root, static_cast<int>(p.radius + p.thickness));
    std::vector<NodeId> core, iface;
    std::vector<std::string> marks;
    for (NodeId v = 0; v < g.node_count(); ++v) {
      if (dist[v] == kUnreached) continue;
      if (dist[v] <= static_cast<int>(p.radius)) {
        core.push_back(v);
      } else {
        iface.push_back(v);
        marks.push_back("i" + std::to_string(dist[v] - static_cast<int>(p.radius)));
      }
    }
    CipSite site = detail::build_site(g, core, iface, marks, root);
    site.cip.params = p;
    auto [ig, im] = detail::interface_graph(site.cip);
    site.cip.interface_cert =
        Certificate{Fnv1a().str("flat").u64(p.radius).u64(p.thickness).u64(certificate(ig, im).value).digest()};
    site.cip.core_cert = detail::core_certificate(site.cip);
    return site;
  }

  if (!p.coarsened) throw Error(ErrorKind::invalid_argument, "flat CIP parameters given with a coarsening");
  if (coarse->base_to_coarse.size() != g.node_count())
    throw Error(ErrorKind::invalid_argument, "coarsening does not cover the base graph (missing cids)");
  const LabeledGraph& cg = coarse->coarse;
  require_node(cg, root);
  const int radius = static_cast<int>(p.radius);
  const auto cdist = distances_from(cg, root, radius + static_cast<int>(p.thickness));

  std::vector<NodeId> core;
  for (NodeId c = 0; c < cg.node_count(); ++c)
    if (cdist[c] != kUnreached && cdist[c] <= radius)
      core.insert(core.end(), coarse->coarse_to_base[c].begin(), coarse->coarse_to_base[c].end());
  std::sort(core.begin(), core.end());

  const auto bdist = distances_from(g, core, static_cast<int>(p.base_thickness));
  std::vector<NodeId> iface;
  std::vector<std::string> marks;
  for (NodeId v = 0; v < g.node_count(); ++v) {
    if (bdist[v] == kUnreached || bdist[v] == 0) continue;
    const NodeId c = coarse->base_to_coarse[v];
    const std::string cd = cdist[c] == kUnreached ? "x" : std::to_string(cdist[c] - radius);
    iface.push_back(v);
    marks.push_back("i" + std::to_string(bdist[v]) + "/" + cd + "/" + cg.label(c));
  }

  std::vector<NodeId> coarse_iface;
  std::vector<std::uint64_t> coarse_marks;
  for (NodeId c = 0; c < cg.node_count(); ++c) {
    if (cdist[c] == kUnreached || cdist[c] <= radius) continue;
    coarse_iface.push_back(c);
    coarse_marks.push_back(hash_string(std::to_string(cdist[c] - radius)));
  }
  const auto coarse_sub = induced_subgraph(cg, coarse_iface);

  const NodeId base_root = coarse->coarse_to_base[root].front();
  CipSite site = detail::build_site(g, core, iface, marks, base_root);
  site.cip.params = p;
  auto [ig, im] = detail::interface_graph(site.cip);
  site.cip.interface_cert = Certificate{Fnv1a()
                                            .str("coarse")
                                            .u64(p.radius)
                                            .u64(p.thickness)
                                            .u64(p.base_thickness)
                                            .u64(certificate(ig, im).value)
                                            .u64(certificate(coarse_sub.graph, coarse_marks).value)
                                            .digest()};
  site.cip.core_cert = detail::core_certificate(site.cip);
  return site;
}

struct Substitution {
  LabeledGraph graph;
  NodeId root = 0;  // replacement root in the output graph
};

/// Replaces the core at `site` by the core of `replacement`. The two
/// interfaces are matched by an explicit mark-respecting isomorphism; the
/// replacement's core-core and core-interface edges are installed through
/// it. Surviving nodes keep their relative order and the new core nodes are
/// appended. cids are cleared: coarsenings are recomputed, never patched.
inline Substitution substitute(const LabeledGraph& g, const CipSite& site, const Cip& replacement) {
  if (site.cip.interface_cert != replacement.interface_cert)
    throw Error(ErrorKind::invalid_argument, "substitution requires equal interface certificates");

  const auto [old_iface, old_marks] = detail::interface_graph(site.cip);
  const auto [new_iface, new_marks] = detail::interface_graph(replacement);
  const auto match = find_isomorphism(new_iface, new_marks, old_iface, old_marks);
  if (!match)
    throw Error(ErrorKind::hash_collision,
                "hash collision: interface certificate " + replacement.interface_cert.hex() + " without isomorphism");

  constexpr NodeId kAbsent = UINT32_MAX;
  std::vector<bool> removed(g.node_count(), false);
  for (std::size_t k = 0; k < site.cip.core_size; ++k) removed[site.origin[k]] = true;

  Substitution out;
  std::vector<NodeId> kept(g.node_count(), kAbsent);
  for (NodeId v = 0; v < g.node_count(); ++v)
    if (!removed[v]) kept[v] = out.graph.add_node(g.label(v));

  std::vector<NodeId> placed(replacement.fragment.node_count(), kAbsent);
  for (NodeId f = 0; f < replacement.core_size; ++f) placed[f] = out.graph.add_node(replacement.fragment.label(f));
  for (auto f = static_cast<NodeId>(replacement.core_size); f < replacement.fragment.node_count(); ++f) {
    const NodeId old_fragment_node = static_cast<NodeId>(site.cip.core_size) + (*match)[f - replacement.core_size];
    placed[f] = kept[site.origin[old_fragment_node]];
  }

  for (const auto& e : g.edges())
    if (!removed[e.a] && !removed[e.b]) out.graph.add_edge(kept[e.a], kept[e.b], e.label);
  for (const auto& e : replacement.fragment.edges())
    if (e.a < replacement.core_size || e.b < replacement.core_size)
      out.graph.add_edge(placed[e.a], placed[e.b], e.label);

  out.root = placed[replacement.root];
  return out;
}

struct Production {
  Cip cip;
  std::size_t count = 0;
  // First occurrence in the induction corpus (root is a coarse node id in
  // coarsened mode).
  std::size_t source_graph = 0;
  NodeId source_root = 0;
};

/// Productions keyed by interface certificate; each list is sorted by core
/// certificate.
class Grammar {
 public:
  Grammar() = default;
  Grammar(std::vector<CipParams> params, std::string coarsener)
      : params_(std::move(params)), coarsener_(std::move(coarsener)) {}

  const std::vector<CipParams>& params() const noexcept { return params_; }
  /// "none", "rna" or "mol".
  const std::string& coarsener() const noexcept { return coarsener_; }
  bool coarsened() const noexcept { return coarsener_ != "none"; }

  const std::map<Certificate, std::vector<Production>>& productions() const noexcept { return productions_; }

  const std::vector<Production>* find(Certificate interface_cert) const {
    auto it = productions_.find(interface_cert);
    return it == productions_.end() ? nullptr : &it->second;
  }

  /// Adds occurrences of a production. With `exact`, CIPs sharing both
  /// certificates are only merged when their fragments are isomorphic.
  void add(Production prod, bool exact = false) {
    auto& list = productions_[prod.cip.interface_cert];
    auto it = std::lower_bound(list.begin(), list.end(), prod.cip.core_cert,
                               [](const Production& p, Certificate c) { return p.cip.core_cert < c; });
    for (; it != list.end() && it->cip.core_cert == prod.cip.core_cert; ++it) {
      if (exact && !same_fragment(it->cip, prod.cip)) continue;
      it->count += prod.count;
      if (std::pair(prod.source_graph, prod.source_root) < std::pair(it->source_graph, it->source_root)) {
        it->source_graph = prod.source_graph;
        it->source_root = prod.source_root;
      }
      return;
    }
    list.insert(it, std::move(prod));
  }

  void merge(const Grammar& other, bool exact = false) {
    for (const auto& [key, list] : other.productions_)
      for (const auto& prod : list) add(prod, exact);
  }

  void prune(std::size_t min_count) {
    for (auto it = productions_.begin(); it != productions_.end();) {
      auto& list = it->second;
      list.erase(std::remove_if(list.begin(), list.end(), [&](const Production& p) { return p.count < min_count; }),
                 list.end());
      it = list.empty() ? productions_.erase(it) : std::next(it);
    }
  }

  std::size_t size() const noexcept {
    std::size_t total = 0;
    for (const auto& [key, list] : productions_) total += list.size();
    return total;
  }

  /// Interface classes offering at least two distinct cores.
  std::size_t productive_interfaces() const noexcept {
    std::size_t total = 0;
    for (const auto& [key, list] : productions_) {
      if (list.size() >= 2 && list.front().cip.core_cert != list.back().cip.core_cert) ++total;
    }
    return total;
  }

 private:
  static bool same_fragment(const Cip& a, const Cip& b) {
    return isomorphic(a.fragment, hash_marks(a.marks), b.fragment, hash_marks(b.marks));
  }

  std::vector<CipParams> params_;
  std::string coarsener_ = "none";
  std::map<Certificate, std::vector<Production>> productions_;
};

struct InduceOptions {
  std::size_t min_count = 1;
  bool exact_iso = false;
  unsigned threads = 1;
};

namespace detail {

inline void collect(Grammar& out, const LabeledGraph& g, std::size_t index, const Coarsener* coarsener,
                    std::span<const CipParams> grid, bool exact) {
  std::optional<Coarsener::Coarsened> coarse;
  if (coarsener) coarse = coarsener->coarsen(g);
  const LabeledGraph& base = coarse ? coarse->annotated : g;
  const std::size_t roots = coarse ? coarse->result.coarse.node_count() : g.node_count();
  for (const auto& p : grid) {
    for (NodeId root = 0; root < roots; ++root) {
      CipSite site = extract_cip(base, coarse ? &coarse->result : nullptr, root, p);
      if (site.cip.interface_size() == 0) continue;
      out.add(Production{std::move(site.cip), 1, index, root}, exact);
    }
  }
}

}  // namespace detail

/// Extracts a CIP at every root of every corpus graph for every parameter
/// combination, aggregates identical (interface, core) pairs and drops those
/// seen fewer than min_count times. CIPs with an empty interface (the core
/// covers its whole component) carry no context and are skipped. Partial
/// grammars from worker threads are merged in corpus order, so the result
/// does not depend on the thread count.
inline Grammar induce(std::span<const LabeledGraph> corpus, const Coarsener* coarsener,
                      std::span<const CipParams> grid, const InduceOptions& opts = {}) {
  if (corpus.empty()) throw Error(ErrorKind::invalid_argument, "cannot induce a grammar from an empty corpus");
  if (grid.empty()) throw Error(ErrorKind::invalid_argument, "empty parameter grid");
  for (const auto& p : grid) {
    p.validate();
    if (p.coarsened != (coarsener != nullptr))
      throw Error(ErrorKind::invalid_argument, "parameter grid and coarsener disagree on coarsened mode");
  }
  std::vector<CipParams> params(grid.begin(), grid.end());
  std::sort(params.begin(), params.end());
  params.erase(std::unique(params.begin(), params.end()), params.end());
  const std::string name = coarsener ? std::string(coarsener->name()) : "none";

  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(opts.threads, corpus.size()));
  std::vector<Grammar> partial(workers, Grammar(params, name));
  if (workers == 1) {
    for (std::size_t i = 0; i < corpus.size(); ++i)
      detail::collect(partial[0], corpus[i], i, coarsener, params, opts.exact_iso);
  } else {
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    const std::size_t chunk = (corpus.size() + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w * chunk; i < std::min(corpus.size(), (w + 1) * chunk); ++i)
            detail::collect(partial[w], corpus[i], i, coarsener, params, opts.exact_iso);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
    for (std::size_t w = 1; w < workers; ++w) partial[0].merge(partial[w], opts.exact_iso);
  }
  partial[0].prune(opts.min_count);
  return std::move(partial[0]);
}

struct Proposal {
  LabeledGraph graph;
  NodeId root = 0;
  CipParams params;
  Certificate interface_cert;
  Certificate core_cert;
};

inline constexpr std::size_t kDefaultAttempts = 30;

/// One grammar move: uniform root, uniform parameter combination, uniform
/// choice among the stored cores with the same interface and a different
/// core certificate. Returns nullopt after `attempts` roots without an
/// applicable rule.
inline std::optional<Proposal> propose(const Grammar& gr, const LabeledGraph& g, const Coarsener* coarsener, Rng& rng,
                                       std::size_t attempts = kDefaultAttempts) {
  if (g.empty()) throw Error(ErrorKind::invalid_argument, "cannot propose from an empty graph");
  if (gr.params().empty() || gr.productions().empty()) return std::nullopt;
  if (gr.coarsened() && !coarsener) throw Error(ErrorKind::invalid_argument, "coarsened grammar needs a coarsener");

  std::optional<Coarsener::Coarsened> coarse;
  if (gr.coarsened()) coarse = coarsener->coarsen(g);
  const LabeledGraph& base = coarse ? coarse->annotated : g;
  const std::size_t roots = coarse ? coarse->result.coarse.node_count() : g.node_count();

  std::vector<std::size_t> candidates;
  for (std::size_t attempt = 0; attempt < attempts; ++attempt) {
    const auto root = static_cast<NodeId>(rng.uniform_index(roots));
    const CipParams& p = gr.params()[rng.uniform_index(gr.params().size())];
    CipSite site = extract_cip(base, coarse ? &coarse->result : nullptr, root, p);
    if (site.cip.interface_size() == 0) continue;
    const auto* list = gr.find(site.cip.interface_cert);
    if (!list) continue;
    candidates.clear();
    for (std::size_t k = 0; k < list->size(); ++k)
      if ((*list)[k].cip.core_cert != site.cip.core_cert) candidates.push_back(k);
    if (candidates.empty()) continue;
    const Production& chosen = (*list)[candidates[rng.uniform_index(candidates.size())]];
    try {
      auto sub = substitute(base, site, chosen.cip);
      return Proposal{std::move(sub.graph), sub.root, p, chosen.cip.interface_cert, chosen.cip.core_cert};
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::hash_collision) throw;
    }
  }
  return std::nullopt;
}

/// Exhaustive version of the applicability test in propose: true when some
/// root and parameter combination has a stored alternative core.
inline bool can_move(const Grammar& gr, const LabeledGraph& g, const Coarsener* coarsener) {
  if (g.empty() || gr.params().empty() || gr.productions().empty()) return false;
  if (gr.coarsened() && !coarsener) throw Error(ErrorKind::invalid_argument, "coarsened grammar needs a coarsener");
  std::optional<Coarsener::Coarsened> coarse;
  if (gr.coarsened()) coarse = coarsener->coarsen(g);
  const LabeledGraph& base = coarse ? coarse->annotated : g;
  const std::size_t roots = coarse ? coarse->result.coarse.node_count() : g.node_count();
  for (NodeId root = 0; root < roots; ++root)
    for (const auto& p : gr.params()) {
      const CipSite site = extract_cip(base, coarse ? &coarse->result : nullptr, root, p);
      if (site.cip.interface_size() == 0) continue;
      const auto* list = gr.find(site.cip.interface_cert);
      if (!list) continue;
      for (const auto& prod : *list)
        if (prod.cip.core_cert != site.cip.core_cert) return true;
    }
  return false;
}

/// Re-extracts the CIP at a proposal's insertion site. nullopt when the
/// product graph cannot be coarsened.
inline std::optional<CipSite> reextract(const Proposal& prop, const Coarsener* coarsener) {
  if (!prop.params.coarsened) return extract_cip(prop.graph, nullptr, prop.root, prop.params);
  if (!coarsener) throw Error(ErrorKind::invalid_argument, "coarsened proposal needs a coarsener");
  std::optional<Coarsener::Coarsened> coarse;
  try {
    coarse = coarsener->coarsen(prop.graph);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::validation) throw;
    return std::nullopt;
  }
  return extract_cip(coarse->annotated, &coarse->result, coarse->result.base_to_coarse[prop.root], prop.params);
}

enum class Closure { holds, violated, not_coarsenable };

/// Substitution closure: the interface seen from the inserted core equals
/// the interface it was matched against. Products the coarsener rejects
/// have no site to compare and are reported separately.
inline Closure check_closure(const Proposal& prop, const Coarsener* coarsener) {
  const auto site = reextract(prop, coarsener);
  if (!site) return Closure::not_coarsenable;
  return site->cip.interface_cert == prop.interface_cert ? Closure::holds : Closure::violated;
}

inline bool closure_holds(const Proposal& prop, const Coarsener* coarsener) {
  return check_closure(prop, coarsener) == Closure::holds;
}

}  // namespace grammargen

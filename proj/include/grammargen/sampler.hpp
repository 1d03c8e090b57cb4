#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "grammargen/coarsen.hpp"
#include "grammargen/error.hpp"
#include "grammargen/estimator.hpp"
#include "grammargen/fold.hpp"
#include "grammargen/grammar.hpp"
#include "grammargen/kernel.hpp"
#include "grammargen/rng.hpp"

namespace grammargen {

enum class TransformerKind { none, rna_refold };

inline TransformerKind transformer_from_name(std::string_view name) {
  if (name == "none") return TransformerKind::none;
  if (name == "rna-refold") return TransformerKind::rna_refold;
  throw Error(ErrorKind::invalid_argument, "unknown transformer '" + std::string(name) + "'");
}

inline std::string_view transformer_name(TransformerKind t) noexcept {
  return t == TransformerKind::none ? "none" : "rna-refold";
}

struct SamplerConfig {
  std::size_t steps = 1000;
  std::size_t burn_in = 100;
  std::size_t sample_interval = 50;
  std::size_t n_attempts = kDefaultAttempts;
  std::uint64_t seed = 1;
  TransformerKind transformer = TransformerKind::none;
  double accept_floor = 1e-9;
  double audit_rate = 0.01;  // fraction of proposals re-checked for closure
  KernelParams kernel;
  RnaRules rules;

  void validate() const {
    if (steps < burn_in) throw Error(ErrorKind::invalid_argument, "steps must be >= burn_in");
    if (sample_interval == 0) throw Error(ErrorKind::invalid_argument, "sample_interval must be >= 1");
    if (n_attempts == 0) throw Error(ErrorKind::invalid_argument, "n_attempts must be >= 1");
    if (!(accept_floor > 0.0 && accept_floor < 1.0))
      throw Error(ErrorKind::invalid_argument, "accept_floor must lie in (0, 1)");
    if (!(audit_rate >= 0.0 && audit_rate <= 1.0))
      throw Error(ErrorKind::invalid_argument, "audit_rate must lie in [0, 1]");
    kernel.validate();
  }
};

struct ChainRecord {
  std::size_t step = 0;
  LabeledGraph graph;
  double score = 0.0;
  bool accepted = false;

  bool operator==(const ChainRecord&) const = default;
};

struct ChainStats {
  std::size_t proposed = 0;
  std::size_t accepted = 0;
  std::size_t exhausted = 0;   // no applicable rule within n_attempts roots
  std::size_t infeasible = 0;  // transformer or coarsener rejected the product
  std::size_t audited = 0;
  std::size_t audit_failures = 0;       // re-extracted interface differs
  std::size_t audit_not_coarsenable = 0;
};

struct ChainResult {
  std::vector<ChainRecord> records;
  ChainStats stats;
};

/// Metropolis-style rule: accept with probability min(1, new/old), both
/// scores floored at `floor`.
inline bool accept(double score_old, double score_new, Rng& rng, double floor = 1e-9) {
  const double o = std::max(score_old, floor);
  const double n = std::max(score_new, floor);
  if (n >= o) return true;
  return rng.uniform01() < n / o;
}

/// Reads the sequence off the backbone, drops every pair edge and installs
/// the pairs of the Nussinov fold. Node ids and backbone edges are kept;
/// cids are cleared. Pair edges of the input may cross or clash.
inline LabeledGraph rna_transformer(const LabeledGraph& g, const RnaRules& rules = {}) {
  LabeledGraph backbone;
  for (const auto& node : g.nodes()) backbone.add_node(node.label);
  for (const auto& e : g.edges()) {
    if (e.label == kBackboneLabel) backbone.add_edge(e.a, e.b, e.label);
    else if (e.label != kPairLabel)
      throw Error(ErrorKind::validation, "rna graph: unexpected edge label '" + e.label + "'");
  }
  const auto reading = read_rna_graph(backbone);
  const auto folded = nussinov_fold(reading.structure.sequence, rules);
  LabeledGraph out = backbone;
  for (const auto& p : folded.pairs) out.add_edge(reading.order[p.i], reading.order[p.j], std::string(kPairLabel));
  return out;
}

inline LabeledGraph apply_transformer(TransformerKind t, const LabeledGraph& g, const RnaRules& rules) {
  if (t == TransformerKind::rna_refold) return rna_transformer(g, rules);
  return g;
}

inline double floored_score(const OneClassModel& m, const LabeledGraph& g, const SamplerConfig& cfg) {
  return std::max(score(m, vectorize(g, cfg.kernel)), cfg.accept_floor);
}

/// One chain: propose, transform, score, accept. Step s in 1..steps is
/// emitted when s > burn_in and (s - burn_in) is a multiple of
/// sample_interval. Proposals whose product the transformer or the
/// coarsener rejects count as rejections.
inline ChainResult run_chain(const LabeledGraph& seed_graph, const Grammar& gr, const OneClassModel& model,
                             const Coarsener* coarsener, const SamplerConfig& cfg) {
  cfg.validate();
  if (gr.size() == 0) throw Error(ErrorKind::invalid_argument, "grammar is empty");
  if (gr.coarsened()) {
    if (!coarsener) throw Error(ErrorKind::invalid_argument, "coarsened grammar needs a coarsener");
    coarsener->coarsen(seed_graph);  // throws when the seed is not valid for it
  }

  Rng rng(cfg.seed);
  Rng audit_rng(derive_seed(cfg.seed, 0xa0d17));
  ChainResult out;
  LabeledGraph current = seed_graph;
  current.clear_cids();
  double current_score = floored_score(model, current, cfg);

  for (std::size_t step = 1; step <= cfg.steps; ++step) {
    bool accepted = false;
    auto prop = propose(gr, current, coarsener, rng, cfg.n_attempts);
    if (!prop) {
      if (step == 1 && !can_move(gr, current, coarsener))
        throw Error(ErrorKind::exhausted, "grammar cannot move seed");
      ++out.stats.exhausted;
    } else {
      ++out.stats.proposed;
      if (cfg.audit_rate > 0.0 && audit_rng.uniform01() < cfg.audit_rate) {
        ++out.stats.audited;
        const auto c = check_closure(*prop, coarsener);
        if (c == Closure::violated) ++out.stats.audit_failures;
        else if (c == Closure::not_coarsenable) ++out.stats.audit_not_coarsenable;
      }
      std::optional<LabeledGraph> candidate;
      try {
        candidate = apply_transformer(cfg.transformer, prop->graph, cfg.rules);
        candidate->clear_cids();
        if (gr.coarsened()) coarsener->coarsen(*candidate);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::validation) throw;
        candidate.reset();
        ++out.stats.infeasible;
      }
      if (candidate) {
        const double s = floored_score(model, *candidate, cfg);
        if (accept(current_score, s, rng, cfg.accept_floor)) {
          current = std::move(*candidate);
          current_score = s;
          accepted = true;
          ++out.stats.accepted;
        }
      }
    }
    if (step > cfg.burn_in && (step - cfg.burn_in) % cfg.sample_interval == 0)
      out.records.push_back(ChainRecord{step, current, current_score, accepted});
  }
  return out;
}

struct ChainSet {
  std::vector<ChainResult> chains;  // chain index order
};

/// Chain c starts from seeds[c % seeds.size()] with stream seed
/// derive_seed(cfg.seed, c). Results do not depend on `threads`.
inline ChainSet run_chains(std::span<const LabeledGraph> seeds, const Grammar& gr, const OneClassModel& model,
                           const Coarsener* coarsener, const SamplerConfig& cfg, std::size_t chains,
                           std::size_t threads = 1) {
  if (seeds.empty()) throw Error(ErrorKind::invalid_argument, "no seed graphs");
  if (chains == 0) throw Error(ErrorKind::invalid_argument, "chains must be >= 1");
  ChainSet out;
  out.chains.resize(chains);
  std::vector<std::exception_ptr> errors(chains);
  auto run_one = [&](std::size_t c) {
    try {
      SamplerConfig local = cfg;
      local.seed = derive_seed(cfg.seed, c);
      out.chains[c] = run_chain(seeds[c % seeds.size()], gr, model, coarsener, local);
    } catch (...) {
      errors[c] = std::current_exception();
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, chains);
  if (workers == 1) {
    for (std::size_t c = 0; c < chains; ++c) run_one(c);
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t c = w; c < chains; c += workers) run_one(c);
      });
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace grammargen

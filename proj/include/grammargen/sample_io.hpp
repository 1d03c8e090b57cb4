#pragma once

#include <string>

#include "grammargen/graph_json.hpp"
#include "grammargen/sampler.hpp"

namespace grammargen {

/// One JSONL record: the graph plus chain/step/score metadata.
inline json sample_to_json(const ChainRecord& r, std::size_t chain) {
  return json{{"chain", chain},
              {"step", r.step},
              {"score", r.score},
              {"accepted", r.accepted},
              {"graph", graph_to_json(r.graph)}};
}

/// Chains in index order, records in step order, one line each.
inline std::string samples_to_jsonl(const ChainSet& set) {
  std::string out;
  for (std::size_t c = 0; c < set.chains.size(); ++c)
    for (const auto& r : set.chains[c].records) {
      out += sample_to_json(r, c).dump();
      out += '\n';
    }
  return out;
}

inline ChainStats total_stats(const ChainSet& set) {
  ChainStats t;
  for (const auto& c : set.chains) {
    t.proposed += c.stats.proposed;
    t.accepted += c.stats.accepted;
    t.exhausted += c.stats.exhausted;
    t.infeasible += c.stats.infeasible;
    t.audited += c.stats.audited;
    t.audit_failures += c.stats.audit_failures;
    t.audit_not_coarsenable += c.stats.audit_not_coarsenable;
  }
  return t;
}

inline std::vector<LabeledGraph> sampled_graphs(const ChainSet& set) {
  std::vector<LabeledGraph> out;
  for (const auto& c : set.chains)
    for (const auto& r : c.records) out.push_back(r.graph);
  return out;
}

}  // namespace grammargen

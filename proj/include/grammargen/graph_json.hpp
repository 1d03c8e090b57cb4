#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "grammargen/error.hpp"
#include "grammargen/graph.hpp"

namespace grammargen {

using json = nlohmann::json;

/// A parsed graph together with the ids the nodes carried in the document.
struct IdentifiedGraph {
  LabeledGraph graph;
  std::vector<std::int64_t> ids;
};

/// {"nodes":[{"id","label","cid"?}], "edges":[{"a","b","label"}]}. Node and
/// edge order is kept so that a parse/serialize cycle is byte-identical.
inline json graph_to_json(const LabeledGraph& g, const std::vector<std::int64_t>& ids = {}) {
  if (!ids.empty() && ids.size() != g.node_count())
    throw Error(ErrorKind::invalid_argument, "id list does not match node count");
  auto id_of = [&](NodeId v) -> std::int64_t { return ids.empty() ? static_cast<std::int64_t>(v) : ids[v]; };

  json nodes = json::array();
  for (NodeId v = 0; v < g.node_count(); ++v) {
    json n = {{"id", id_of(v)}, {"label", g.label(v)}};
    if (g.node(v).cid) n["cid"] = *g.node(v).cid;
    nodes.push_back(std::move(n));
  }
  json edges = json::array();
  for (const auto& e : g.edges()) edges.push_back({{"a", id_of(e.a)}, {"b", id_of(e.b)}, {"label", e.label}});
  return {{"nodes", std::move(nodes)}, {"edges", std::move(edges)}};
}

inline IdentifiedGraph identified_graph_from_json(const json& doc) {
  auto fail = [](const std::string& msg) { throw Error(ErrorKind::validation, "graph json: " + msg); };
  if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array()) fail("missing \"nodes\" array");

  IdentifiedGraph out;
  std::map<std::int64_t, NodeId> index;
  for (const auto& n : doc["nodes"]) {
    if (!n.is_object() || !n.contains("id") || !n["id"].is_number_integer()) fail("node without integer id");
    const auto id = n["id"].get<std::int64_t>();
    std::string label;
    if (n.contains("label")) {
      if (!n["label"].is_string()) fail("node label must be a string");
      label = n["label"].get<std::string>();
    }
    std::optional<std::uint32_t> cid;
    if (n.contains("cid") && !n["cid"].is_null()) {
      if (!n["cid"].is_number_unsigned() || n["cid"].get<std::uint64_t>() > UINT32_MAX)
        fail("cid must be a natural number");
      cid = n["cid"].get<std::uint32_t>();
    }
    if (!index.emplace(id, static_cast<NodeId>(out.ids.size())).second) fail("duplicate node id " + std::to_string(id));
    out.graph.add_node(std::move(label), cid);
    out.ids.push_back(id);
  }

  if (doc.contains("edges")) {
    if (!doc["edges"].is_array()) fail("\"edges\" must be an array");
    for (const auto& e : doc["edges"]) {
      if (!e.is_object() || !e.contains("a") || !e.contains("b") || !e["a"].is_number_integer() ||
          !e["b"].is_number_integer())
        fail("edge without integer endpoints");
      const auto ia = index.find(e["a"].get<std::int64_t>());
      const auto ib = index.find(e["b"].get<std::int64_t>());
      if (ia == index.end() || ib == index.end()) fail("edge references unknown node");
      std::string label;
      if (e.contains("label")) {
        if (!e["label"].is_string()) fail("edge label must be a string");
        label = e["label"].get<std::string>();
      }
      try {
        out.graph.add_edge(ia->second, ib->second, std::move(label));
      } catch (const Error& err) {
        fail(err.what());
      }
    }
  }
  return out;
}

inline LabeledGraph graph_from_json(const json& doc) { return identified_graph_from_json(doc).graph; }

}  // namespace grammargen

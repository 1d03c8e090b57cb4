#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "grammargen/grammar.hpp"
#include "grammargen/graph_json.hpp"

namespace grammargen {

inline constexpr std::string_view kGrammarFormat = "grammargen.grammar";
inline constexpr int kGrammarVersion = 1;

inline json params_to_json(const CipParams& p) {
  return {{"radius", p.radius}, {"thickness", p.thickness}, {"base_thickness", p.base_thickness},
          {"coarsened", p.coarsened}};
}

inline CipParams params_from_json(const json& j) {
  CipParams p;
  p.radius = j.at("radius").get<unsigned>();
  p.thickness = j.at("thickness").get<unsigned>();
  p.base_thickness = j.at("base_thickness").get<unsigned>();
  p.coarsened = j.at("coarsened").get<bool>();
  p.validate();
  return p;
}

/// Versioned JSON document; productions sorted by interface then core
/// certificate, so equal grammars serialize to identical bytes.
inline json grammar_to_json(const Grammar& gr) {
  json params = json::array();
  for (const auto& p : gr.params()) params.push_back(params_to_json(p));
  json productions = json::array();
  for (const auto& [iface, list] : gr.productions()) {
    json entries = json::array();
    for (const auto& prod : list) {
      entries.push_back({{"core", prod.cip.core_cert.hex()},
                         {"count", prod.count},
                         {"source_graph", prod.source_graph},
                         {"source_root", prod.source_root},
                         {"params", params_to_json(prod.cip.params)},
                         {"core_size", prod.cip.core_size},
                         {"root", prod.cip.root},
                         {"marks", prod.cip.marks},
                         {"fragment", graph_to_json(prod.cip.fragment)}});
    }
    productions.push_back({{"interface", iface.hex()}, {"entries", std::move(entries)}});
  }
  return {{"format", kGrammarFormat},
          {"version", kGrammarVersion},
          {"coarsener", gr.coarsener()},
          {"params", std::move(params)},
          {"productions", std::move(productions)}};
}

inline Grammar grammar_from_json(const json& doc) {
  try {
    if (doc.at("format").get<std::string>() != kGrammarFormat)
      throw Error(ErrorKind::validation, "not a grammar document");
    if (doc.at("version").get<int>() != kGrammarVersion)
      throw Error(ErrorKind::validation, "unsupported grammar version " + doc.at("version").dump());
    std::vector<CipParams> params;
    for (const auto& p : doc.at("params")) params.push_back(params_from_json(p));
    Grammar gr(std::move(params), doc.at("coarsener").get<std::string>());
    for (const auto& group : doc.at("productions")) {
      const auto iface = Certificate::from_hex(group.at("interface").get<std::string>());
      for (const auto& e : group.at("entries")) {
        Production prod;
        prod.cip.fragment = graph_from_json(e.at("fragment"));
        prod.cip.core_size = e.at("core_size").get<std::size_t>();
        prod.cip.root = e.at("root").get<NodeId>();
        prod.cip.marks = e.at("marks").get<std::vector<std::string>>();
        prod.cip.params = params_from_json(e.at("params"));
        prod.cip.interface_cert = iface;
        prod.cip.core_cert = Certificate::from_hex(e.at("core").get<std::string>());
        prod.count = e.at("count").get<std::size_t>();
        prod.source_graph = e.at("source_graph").get<std::size_t>();
        prod.source_root = e.at("source_root").get<NodeId>();
        if (prod.cip.marks.size() != prod.cip.fragment.node_count() || prod.cip.core_size == 0 ||
            prod.cip.core_size > prod.cip.fragment.node_count() || prod.cip.root >= prod.cip.core_size)
          throw Error(ErrorKind::validation, "malformed production under interface " + iface.hex());
        gr.add(std::move(prod));
      }
    }
    return gr;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::validation, std::string("grammar document: ") + e.what());
  }
}

inline std::string serialize_grammar(const Grammar& gr) { return grammar_to_json(gr).dump(1) + "\n"; }

inline void write_grammar(const std::string& path, const Grammar& gr) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path);
  out << serialize_grammar(gr);
}

inline Grammar read_grammar(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path);
  try {
    return grammar_from_json(json::parse(in));
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::validation, path + ": " + e.what());
  }
}

}  // namespace grammargen

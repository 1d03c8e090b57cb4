#pragma once

#include <cctype>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "grammargen/coarsen.hpp"
#include "grammargen/error.hpp"
#include "grammargen/graph_json.hpp"
#include "grammargen/rna.hpp"

namespace grammargen {

struct RnaRecord {
  std::string name;
  RnaStructure structure;
  std::size_t line = 0;  // line of the header
};

struct RecordError {
  std::string name;
  std::size_t line = 0;
  std::string message;
};

struct ParsedRecords {
  std::vector<RnaRecord> records;
  std::vector<RecordError> errors;  // only filled in lenient mode
};

namespace detail {

inline std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

inline std::string record_message(std::size_t line, const std::string& name, const std::string& what) {
  return "line " + std::to_string(line) + " (" + name + "): " + what;
}

}  // namespace detail

/// Records of three lines: ">name", sequence, dot-bracket. Blank lines and
/// lines starting with '#' are skipped. Each structure is validated against
/// `rules`. In strict mode the first bad record throws a validation error
/// naming its line; in lenient mode bad records are reported and skipped.
inline ParsedRecords parse_dot_bracket(std::string_view text, const RnaRules& rules = {}, bool lenient = false) {
  struct Line {
    std::size_t number;
    std::string text;
  };
  std::vector<Line> lines;
  {
    std::size_t number = 0, pos = 0;
    while (pos <= text.size()) {
      const std::size_t end = std::min(text.find('\n', pos), text.size());
      ++number;
      auto t = detail::trim(text.substr(pos, end - pos));
      if (!t.empty() && t[0] != '#') lines.push_back({number, std::move(t)});
      if (end == text.size()) break;
      pos = end + 1;
    }
  }

  ParsedRecords out;
  auto report = [&](std::size_t line, const std::string& name, const std::string& what) {
    if (!lenient) throw Error(ErrorKind::validation, detail::record_message(line, name, what));
    out.errors.push_back({name, line, what});
  };

  std::size_t k = 0;
  while (k < lines.size()) {
    const Line& head = lines[k];
    if (head.text[0] != '>') {
      report(head.number, "", "expected a '>name' header");
      ++k;
      continue;
    }
    const std::string name = detail::trim(std::string_view(head.text).substr(1));
    std::size_t body = k + 1;
    std::vector<const Line*> rows;
    while (body < lines.size() && lines[body].text[0] != '>' && rows.size() < 2) rows.push_back(&lines[body++]);
    k = body;
    if (rows.size() < 2) {
      report(head.number, name, "record needs a sequence line and a dot-bracket line");
      continue;
    }
    try {
      RnaRecord rec{name, structure_from_dot_bracket(rows[0]->text, rows[1]->text), head.number};
      validate(rec.structure, rules);
      out.records.push_back(std::move(rec));
    } catch (const Error& e) {
      report(rows[1]->number, name, e.what());
    }
  }
  return out;
}

inline std::string format_dot_bracket(const RnaRecord& r) {
  return ">" + r.name + "\n" + r.structure.sequence + "\n" + to_dot_bracket(r.structure) + "\n";
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "cannot read " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_text(const std::string& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "cannot write " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorKind::io, "write failed for " + path);
}

struct Corpus {
  std::vector<LabeledGraph> graphs;
  std::vector<std::string> names;
  std::vector<RecordError> errors;  // lenient mode only
};

/// Loads a graph corpus. Formats, by first non-blank character: '>' for
/// dot-bracket records (turned into nucleotide graphs), '[' for a JSON
/// array of graphs, '{' for one graph per line (JSONL; a single document is
/// one line). JSONL lines may wrap the graph as {"graph": {...}}.
inline Corpus parse_corpus(std::string_view text, const RnaRules& rules = {}, bool lenient = false) {
  Corpus out;
  const std::string head = detail::trim(text.substr(0, std::min<std::size_t>(text.size(), 4096)));
  if (head.empty()) return out;

  if (head[0] == '>') {
    auto parsed = parse_dot_bracket(text, rules, lenient);
    for (auto& r : parsed.records) {
      out.graphs.push_back(rna_graph(r.structure));
      out.names.push_back(r.name);
    }
    out.errors = std::move(parsed.errors);
    return out;
  }

  auto take = [&](const json& doc, std::size_t line, std::size_t index) {
    try {
      const json& g = doc.is_object() && doc.contains("graph") ? doc.at("graph") : doc;
      out.graphs.push_back(graph_from_json(g));
      out.names.push_back(doc.is_object() && doc.contains("name") && doc["name"].is_string()
                              ? doc["name"].get<std::string>()
                              : std::to_string(index));
    } catch (const Error& e) {
      if (!lenient) throw Error(ErrorKind::validation, detail::record_message(line, std::to_string(index), e.what()));
      out.errors.push_back({std::to_string(index), line, e.what()});
    }
  };

  if (head[0] == '[') {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw Error(ErrorKind::validation, std::string("json: ") + e.what());
    }
    for (std::size_t i = 0; i < doc.size(); ++i) take(doc[i], 1, i);
    return out;
  }

  // Try the whole text as one document first (pretty-printed single graph).
  try {
    const json doc = json::parse(text);
    take(doc, 1, 0);
    return out;
  } catch (const json::parse_error&) {
  }
  std::size_t number = 0, pos = 0, index = 0;
  while (pos < text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    ++number;
    const auto line = detail::trim(text.substr(pos, end - pos));
    pos = end + 1;
    if (line.empty()) continue;
    json doc;
    try {
      doc = json::parse(line);
    } catch (const json::parse_error& e) {
      if (!lenient) throw Error(ErrorKind::validation, detail::record_message(number, std::to_string(index), e.what()));
      out.errors.push_back({std::to_string(index), number, e.what()});
      ++index;
      continue;
    }
    take(doc, number, index++);
  }
  return out;
}

inline Corpus load_corpus(const std::string& path, const RnaRules& rules = {}, bool lenient = false) {
  return parse_corpus(read_text(path), rules, lenient);
}

}  // namespace grammargen

#include <catch2/catch.hpp>

#include <set>

#include "grammargen/grammar.hpp"
#include "grammargen/grammar_io.hpp"
#include "support/graphs.hpp"
#include "support/synthetic_rna.hpp"

using namespace grammargen;
using grammargen::testing::path;

namespace {

const CipParams kFlat01{0, 1, 1, false};

std::multiset<std::string> label_multiset(const LabeledGraph& g) {
  std::multiset<std::string> out;
  for (NodeId v = 0; v < g.node_count(); ++v) out.insert(g.label(v));
  return out;
}

std::vector<std::string> fragment_labels(const CipSite& site, bool core) {
  std::vector<std::string> out;
  const auto& c = site.cip;
  for (NodeId v = 0; v < c.fragment.node_count(); ++v)
    if ((v < c.core_size) == core) out.push_back(c.fragment.label(v) + "/" + c.marks[v]);
  return out;
}

}  // namespace

TEST_CASE("flat CIP on a path", "[grammar]") {
  const auto g = path({"a", "b", "c", "d", "e"});
  const auto site = extract_cip(g, nullptr, 2, kFlat01);
  CHECK(site.cip.core_size == 1);
  CHECK(fragment_labels(site, true) == std::vector<std::string>{"c/c"});
  CHECK(fragment_labels(site, false) == std::vector<std::string>{"b/i1", "d/i1"});
  CHECK(site.origin == std::vector<NodeId>{2, 1, 3});
  CHECK(site.cip.fragment.label(site.cip.root) == "c");

  const auto wide = extract_cip(g, nullptr, 2, CipParams{1, 2, 1, false});
  CHECK(fragment_labels(wide, true) == std::vector<std::string>{"b/c", "c/c", "d/c"});
  CHECK(fragment_labels(wide, false) == std::vector<std::string>{"a/i1", "e/i1"});
}

TEST_CASE("interface certificate ignores core labels", "[grammar]") {
  const auto x = extract_cip(path({"a", "b", "a"}), nullptr, 1, kFlat01);
  const auto y = extract_cip(path({"a", "c", "a"}), nullptr, 1, kFlat01);
  CHECK(x.cip.interface_cert == y.cip.interface_cert);
  CHECK(x.cip.core_cert != y.cip.core_cert);
  // a different radius never shares a key
  const auto r1 = extract_cip(path({"a", "b", "c", "b", "a"}), nullptr, 2, CipParams{1, 1, 1, false});
  const auto r0 = extract_cip(path({"a", "c", "a"}), nullptr, 1, CipParams{0, 1, 1, false});
  CHECK(r1.cip.interface_cert != r0.cip.interface_cert);
}

TEST_CASE("coarsened CIP on the hairpin", "[grammar][coarsen]") {
  const auto coarsened = Coarsener::rna().coarsen(rna_graph(grammargen::testing::hairpin9()));
  REQUIRE(coarsened.result.coarse.node_count() == 2);
  const NodeId h = 1;
  REQUIRE(coarsened.result.coarse.label(h) == "H");
  const auto site = extract_cip(coarsened.annotated, &coarsened.result, h, CipParams{0, 1, 1, true});
  // core = AAA at positions 3..5
  CHECK(site.cip.core_size == 3);
  CHECK(std::vector<NodeId>(site.origin.begin(), site.origin.begin() + 3) == std::vector<NodeId>{3, 4, 5});
  // base interface = the closing pair's nucleotides 2 and 6, in the coarse S node at coarse distance 1
  CHECK(fragment_labels(site, false) == std::vector<std::string>{"G/i1/1/S", "C/i1/1/S"});
  CHECK(std::vector<NodeId>(site.origin.begin() + 3, site.origin.end()) == std::vector<NodeId>{2, 6});

  // with B = 2 the next stacked pair joins the interface
  const auto wider = extract_cip(coarsened.annotated, &coarsened.result, h, CipParams{0, 1, 2, true});
  CHECK(wider.cip.interface_size() == 4);
}

TEST_CASE("extract_cip errors", "[grammar]") {
  const auto g = path({"a", "b"});
  CHECK_THROWS_AS(extract_cip(g, nullptr, 5, kFlat01), Error);
  CHECK_THROWS_AS(extract_cip(g, nullptr, 0, CipParams{0, 0, 1, false}), Error);
  CHECK_THROWS_AS(extract_cip(g, nullptr, 0, CipParams{0, 1, 1, true}), Error);
  CoarseningResult empty;
  CHECK_THROWS_AS(extract_cip(g, &empty, 0, CipParams{0, 1, 1, true}), Error);
}

TEST_CASE("induce aggregates counts", "[grammar]") {
  const std::vector<LabeledGraph> one{path({"a", "b", "c", "b"})};
  const std::vector<LabeledGraph> two{one[0], one[0]};
  const std::vector<CipParams> grid{kFlat01, CipParams{1, 1, 1, false}};
  const auto g1 = induce(one, nullptr, grid, {});
  const auto g2 = induce(two, nullptr, grid, {});
  REQUIRE(g1.size() == g2.size());
  auto it1 = g1.productions().begin();
  auto it2 = g2.productions().begin();
  for (; it1 != g1.productions().end(); ++it1, ++it2) {
    REQUIRE(it1->first == it2->first);
    REQUIRE(it1->second.size() == it2->second.size());
    for (std::size_t k = 0; k < it1->second.size(); ++k) {
      CHECK(it2->second[k].count == 2 * it1->second[k].count);
      CHECK(it1->second[k].source_graph == 0);
      CHECK(it1->second[k].cip.interface_cert == it1->first);
    }
  }
}

TEST_CASE("induce finds the b/c swap rule", "[grammar]") {
  const std::vector<LabeledGraph> corpus{path({"a", "b", "a"}), path({"a", "c", "a"})};
  const auto gr = induce(corpus, nullptr, std::vector<CipParams>{kFlat01}, {});
  const auto key = extract_cip(corpus[0], nullptr, 1, kFlat01).cip.interface_cert;
  const auto* list = gr.find(key);
  REQUIRE(list);
  REQUIRE(list->size() == 2);
  std::set<std::string> cores;
  for (const auto& p : *list) {
    cores.insert(p.cip.fragment.label(0));
    CHECK(p.count == 1);
  }
  CHECK(cores == std::set<std::string>{"b", "c"});
  CHECK(gr.productive_interfaces() == 1);
}

TEST_CASE("induce validation and min_count pruning", "[grammar]") {
  const std::vector<LabeledGraph> none;
  CHECK_THROWS_AS(induce(none, nullptr, std::vector<CipParams>{kFlat01}, {}), Error);
  const std::vector<LabeledGraph> corpus{path({"a", "b", "a"}), path({"a", "c", "a"}), path({"a", "b", "a"})};
  CHECK_THROWS_AS(induce(corpus, nullptr, std::vector<CipParams>{}, {}), Error);
  InduceOptions opts;
  opts.min_count = 2;
  const auto gr = induce(corpus, nullptr, std::vector<CipParams>{kFlat01}, opts);
  for (const auto& [key, list] : gr.productions())
    for (const auto& p : list) CHECK(p.count >= 2);
  CHECK(gr.productive_interfaces() == 0);
}

TEST_CASE("induce is deterministic and independent of the thread count", "[grammar]") {
  grammargen::testing::RnaTemplate tpl(3);
  std::vector<LabeledGraph> corpus;
  for (const auto& s : tpl.family(12)) corpus.push_back(rna_graph(s));
  const auto co = Coarsener::rna();
  const std::vector<CipParams> grid{{0, 1, 2, true}, {1, 1, 2, true}};
  InduceOptions serial, parallel;
  parallel.threads = 3;
  const auto a = serialize_grammar(induce(corpus, &co, grid, serial));
  const auto b = serialize_grammar(induce(corpus, &co, grid, serial));
  const auto c = serialize_grammar(induce(corpus, &co, grid, parallel));
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("grammar file round trip", "[grammar][io]") {
  grammargen::testing::RnaTemplate tpl(4);
  std::vector<LabeledGraph> corpus;
  for (const auto& s : tpl.family(6)) corpus.push_back(rna_graph(s));
  const auto co = Coarsener::rna();
  const auto gr = induce(corpus, &co, std::vector<CipParams>{{0, 1, 2, true}}, {});
  const auto text = serialize_grammar(gr);
  const auto back = grammar_from_json(json::parse(text));
  CHECK(serialize_grammar(back) == text);
  CHECK(back.coarsener() == "rna");
  CHECK(back.size() == gr.size());
  CHECK_THROWS_AS(grammar_from_json(json::parse(R"({"format":"other"})")), Error);
}

TEST_CASE("substitution swaps a carbon for a nitrogen", "[grammar][mol]") {
  // C-C-C-O and C-N-C-O: the middle atoms share a two-thick interface
  const auto propanol = path({"C", "C", "C", "O"}, "1");
  const auto amine = path({"C", "N", "C", "O"}, "1");
  const CipParams p{0, 2, 1, false};
  const auto site = extract_cip(propanol, nullptr, 1, p);
  const auto donor = extract_cip(amine, nullptr, 1, p);
  REQUIRE(site.cip.interface_cert == donor.cip.interface_cert);
  const auto sub = substitute(propanol, site, donor.cip);
  CHECK(label_multiset(sub.graph) == std::multiset<std::string>{"C", "C", "N", "O"});
  CHECK(isomorphic(sub.graph, amine));
  CHECK(sub.graph.label(sub.root) == "N");
}

TEST_CASE("substitution rejects mismatched interfaces", "[grammar]") {
  const auto site = extract_cip(path({"a", "b", "a"}), nullptr, 1, kFlat01);
  const auto other = extract_cip(path({"x", "b", "x"}), nullptr, 1, kFlat01);
  CHECK_THROWS_AS(substitute(path({"a", "b", "a"}), site, other.cip), Error);
}

TEST_CASE("propose", "[grammar]") {
  const std::vector<LabeledGraph> corpus{path({"a", "b", "a"}), path({"a", "c", "a"})};
  const auto gr = induce(corpus, nullptr, std::vector<CipParams>{kFlat01}, {});
  Rng rng(1);
  SECTION("the only productive rule turns a-b-a into a-c-a") {
    for (int k = 0; k < 20; ++k) {
      const auto prop = propose(gr, corpus[0], nullptr, rng);
      REQUIRE(prop);
      CHECK(isomorphic(prop->graph, corpus[1]));
      const auto again = reextract(*prop, nullptr);
      REQUIRE(again);
      CHECK(again->cip.core_cert == prop->core_cert);
      CHECK(again->cip.interface_cert == prop->interface_cert);
    }
  }
  SECTION("no productive rule means no proposal") {
    const std::vector<LabeledGraph> mono{path({"a", "b", "a"})};
    const auto dead = induce(mono, nullptr, std::vector<CipParams>{kFlat01}, {});
    for (int k = 0; k < 10; ++k) CHECK_FALSE(propose(dead, mono[0], nullptr, rng).has_value());
  }
}

TEST_CASE("can_move checks every root", "[grammar]") {
  const std::vector<LabeledGraph> corpus{path({"a", "b", "a"}), path({"a", "c", "a"})};
  const auto gr = induce(corpus, nullptr, std::vector<CipParams>{kFlat01}, {});
  CHECK(can_move(gr, corpus[0], nullptr));
  CHECK(can_move(gr, path({"a", "c", "a", "x"}), nullptr));
  CHECK_FALSE(can_move(gr, path({"x", "y"}), nullptr));
  CHECK_FALSE(can_move(gr, LabeledGraph{}, nullptr));
  const std::vector<LabeledGraph> mono{path({"a", "b", "a"})};
  CHECK_FALSE(can_move(induce(mono, nullptr, std::vector<CipParams>{kFlat01}, {}), mono[0], nullptr));
}

TEST_CASE("flat substitutions always satisfy closure", "[grammar][property]") {
  Rng rng(31);
  std::vector<LabeledGraph> corpus;
  for (int k = 0; k < 25; ++k) corpus.push_back(grammargen::testing::random_connected_graph(rng, 6 + rng.uniform_index(8), 2, {"a", "b"}));
  const std::vector<CipParams> grid{{0, 1, 1, false}, {0, 2, 1, false}, {1, 1, 1, false}, {1, 2, 1, false}};
  const auto gr = induce(corpus, nullptr, grid, {});
  std::size_t checked = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const auto prop = propose(gr, corpus[trial % corpus.size()], nullptr, rng);
    if (!prop) continue;
    ++checked;
    const auto site = reextract(*prop, nullptr);
    REQUIRE(site);
    REQUIRE(site->cip.interface_cert == prop->interface_cert);
    REQUIRE(site->cip.core_cert == prop->core_cert);
  }
  CHECK(checked > 300);
}

TEST_CASE("coarsened RNA substitutions never violate closure", "[grammar][coarsen][property]") {
  grammargen::testing::RnaTemplate tpl(12);
  std::vector<LabeledGraph> corpus;
  for (const auto& s : tpl.family(20)) corpus.push_back(rna_graph(s));
  const auto co = Coarsener::rna();
  const auto gr = induce(corpus, &co, std::vector<CipParams>{{0, 1, 2, true}, {1, 1, 2, true}}, {});
  Rng rng(13);
  std::size_t holds = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const auto prop = propose(gr, corpus[trial % corpus.size()], &co, rng);
    if (!prop) continue;
    const auto c = check_closure(*prop, &co);
    REQUIRE(c != Closure::violated);
    holds += c == Closure::holds;
  }
  CHECK(holds > 150);
}

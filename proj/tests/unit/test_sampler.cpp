#include <catch2/catch.hpp>

#include "grammargen/evalkit.hpp"
#include "grammargen/sampler.hpp"
#include "support/graphs.hpp"
#include "support/synthetic_rna.hpp"

using namespace grammargen;
using grammargen::testing::path;

namespace {

Grammar swap_grammar() {
  const std::vector<LabeledGraph> corpus{path({"a", "b", "a"}), path({"a", "c", "a"})};
  return induce(corpus, nullptr, std::vector<CipParams>{{0, 1, 1, false}}, {});
}

SamplerConfig quick(std::size_t steps, std::size_t burn_in, std::size_t interval) {
  SamplerConfig cfg;
  cfg.steps = steps;
  cfg.burn_in = burn_in;
  cfg.sample_interval = interval;
  return cfg;
}

}  // namespace

TEST_CASE("acceptance rule", "[sampler]") {
  Rng rng(1);
  std::size_t hits = 0;
  for (int k = 0; k < 10000; ++k) hits += accept(0.8, 0.4, rng);
  CHECK(std::abs(static_cast<double>(hits) / 10000.0 - 0.5) <= 0.02);
  for (int k = 0; k < 1000; ++k) {
    REQUIRE(accept(0.3, 0.3, rng));
    REQUIRE(accept(0.3, 0.9, rng));
  }
  std::size_t rare = 0;
  for (int k = 0; k < 10000; ++k) rare += accept(1.0, 1e-9, rng);
  CHECK(rare <= 1);
}

TEST_CASE("sampler config validation", "[sampler]") {
  CHECK_THROWS_AS(quick(5, 10, 1).validate(), Error);
  CHECK_THROWS_AS(quick(5, 1, 0).validate(), Error);
  CHECK(transformer_from_name("rna-refold") == TransformerKind::rna_refold);
  CHECK(transformer_name(TransformerKind::none) == "none");
  CHECK_THROWS_AS(transformer_from_name("vienna"), Error);
}

TEST_CASE("rna transformer", "[sampler][rna]") {
  SECTION("a folder optimum is a fixed point") {
    const auto g = rna_graph(grammargen::testing::hairpin9());
    CHECK(rna_transformer(g) == g);
  }
  SECTION("crossing pairs are replaced by a valid fold") {
    auto g = rna_graph(RnaStructure{"GGGAAAACCCAAAAGGG", {}});
    g.add_edge(0, 8, "p");
    g.add_edge(4, 15, "p");  // A-G, crossing
    const auto out = rna_transformer(g);
    const auto reading = read_rna_graph(out);
    CHECK_NOTHROW(validate(reading.structure));
    CHECK(reading.structure.pairs.size() == nussinov_fold(reading.structure.sequence).pairs.size());
    CHECK(rna_transformer(out) == out);
  }
  SECTION("idempotent on random template structures") {
    grammargen::testing::RnaTemplate tpl(5);
    for (int k = 0; k < 30; ++k) {
      const auto once = rna_transformer(rna_graph(tpl.cloverleaf()));
      REQUIRE(rna_transformer(once) == once);
    }
  }
  SECTION("a broken backbone is rejected") {
    auto g = rna_graph(grammargen::testing::hairpin9());
    g.add_edge(0, 4, "b");
    CHECK_THROWS_AS(rna_transformer(g), Error);
  }
}

TEST_CASE("run_chain examples", "[sampler]") {
  const auto gr = swap_grammar();
  const auto model = OneClassModel::constant();
  const auto seed = path({"a", "b", "a"});

  SECTION("constant model accepts everything and the states alternate") {
    const auto r = run_chain(seed, gr, model, nullptr, quick(100, 0, 1));
    REQUIRE(r.records.size() == 100);
    CHECK(r.stats.accepted == 100);
    for (std::size_t k = 0; k < r.records.size(); ++k) {
      const auto& expect = k % 2 == 0 ? path({"a", "c", "a"}) : seed;
      REQUIRE(isomorphic(r.records[k].graph, expect));
      CHECK(r.records[k].accepted);
      CHECK(r.records[k].score == 0.5);
    }
  }
  SECTION("steps == burn_in emits nothing") {
    CHECK(run_chain(seed, gr, model, nullptr, quick(40, 40, 5)).records.empty());
  }
  SECTION("records are spaced by the interval") {
    const auto r = run_chain(seed, gr, model, nullptr, quick(100, 20, 20));
    REQUIRE(r.records.size() == 4);
    CHECK(r.records.front().step == 40);
    CHECK(r.records.back().step == 100);
  }
  SECTION("an immovable seed is an error") {
    CHECK_THROWS_AS(run_chain(path({"x", "y"}), gr, model, nullptr, quick(10, 0, 1)), Error);
  }
  SECTION("full audit finds no closure violations") {
    auto cfg = quick(200, 0, 10);
    cfg.audit_rate = 1.0;
    const auto r = run_chain(seed, gr, model, nullptr, cfg);
    CHECK(r.stats.audited == r.stats.proposed);
    CHECK(r.stats.audit_failures == 0);
  }
}

TEST_CASE("chains are deterministic and independent of threads", "[sampler]") {
  grammargen::testing::RnaTemplate tpl(8);
  std::vector<LabeledGraph> corpus;
  for (const auto& s : tpl.family(10)) corpus.push_back(rna_graph(s));
  const auto co = Coarsener::rna();
  const auto gr = induce(corpus, &co, std::vector<CipParams>{{0, 1, 2, true}, {1, 1, 2, true}}, {});
  const auto model = fit(vectorize_all(corpus));
  auto cfg = quick(60, 10, 10);
  cfg.transformer = TransformerKind::rna_refold;
  const auto a = run_chains(corpus, gr, model, &co, cfg, 4, 1);
  const auto b = run_chains(corpus, gr, model, &co, cfg, 4, 3);
  REQUIRE(a.chains.size() == 4);
  for (std::size_t c = 0; c < 4; ++c) {
    CHECK(a.chains[c].records == b.chains[c].records);
    for (const auto& rec : a.chains[c].records) {
      CHECK(rec.score > 0.0);
      CHECK(rec.score < 1.0);
    }
  }
  CHECK(a.chains[0].records != a.chains[1].records);
}

TEST_CASE("rna-refold chains only emit viable graphs", "[sampler][rna]") {
  grammargen::testing::RnaTemplate tpl(17);
  std::vector<LabeledGraph> corpus;
  for (const auto& s : tpl.family(12)) corpus.push_back(rna_graph(s));
  const std::vector<CipParams> grid{{0, 2, 0, false}, {1, 2, 0, false}};
  const auto gr = induce(corpus, nullptr, grid, {});
  const auto model = fit(vectorize_all(corpus));
  auto cfg = quick(120, 20, 5);
  cfg.transformer = TransformerKind::rna_refold;
  const auto set = run_chains(corpus, gr, model, nullptr, cfg, 3);
  std::size_t emitted = 0;
  for (const auto& chain : set.chains)
    for (const auto& rec : chain.records) {
      ++emitted;
      REQUIRE(rna_validity_filters(rec.graph).pass);
    }
  CHECK(emitted == 60);
}

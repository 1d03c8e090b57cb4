#include <catch2/catch.hpp>

#include "grammargen/graph_json.hpp"
#include "support/graphs.hpp"

using namespace grammargen;

TEST_CASE("graph json round trip is byte-identical", "[graph-core][io]") {
  Rng rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = grammargen::testing::random_graph(rng, 1 + rng.uniform_index(12), 0.3, {"C", "N", "O"}, {"1", "2"});
    for (NodeId v = 0; v < g.node_count(); ++v)
      if (rng.uniform_index(2)) g.set_cid(v, static_cast<std::uint32_t>(rng.uniform_index(5)));
    const std::string text = graph_to_json(g).dump();
    const auto back = graph_from_json(json::parse(text));
    CHECK(back == g);
    CHECK(graph_to_json(back).dump() == text);
  }
}

TEST_CASE("graph json keeps foreign node ids", "[graph-core][io]") {
  const char* text = R"({"nodes":[{"id":10,"label":"a"},{"id":-3,"label":"b","cid":2}],"edges":[{"a":-3,"b":10,"label":"x"}]})";
  const auto parsed = identified_graph_from_json(json::parse(text));
  CHECK(parsed.ids == std::vector<std::int64_t>{10, -3});
  CHECK(parsed.graph.node(1).cid == 2u);
  CHECK(parsed.graph.has_edge(0, 1));
  CHECK(graph_to_json(parsed.graph, parsed.ids).dump() == json::parse(text).dump());
}

TEST_CASE("graph json validation", "[graph-core][io]") {
  auto bad = [](const char* text) { return graph_from_json(json::parse(text)); };
  CHECK_THROWS_AS(bad(R"({"edges":[]})"), Error);
  CHECK_THROWS_AS(bad(R"({"nodes":[{"id":1},{"id":1}]})"), Error);
  CHECK_THROWS_AS(bad(R"({"nodes":[{"id":1}],"edges":[{"a":1,"b":2}]})"), Error);
  CHECK_THROWS_AS(bad(R"({"nodes":[{"id":1}],"edges":[{"a":1,"b":1}]})"), Error);
  CHECK_THROWS_AS(bad(R"({"nodes":[{"id":1},{"id":2}],"edges":[{"a":1,"b":2},{"a":2,"b":1}]})"), Error);
  CHECK_THROWS_AS(bad(R"({"nodes":[{"id":1,"cid":-1}]})"), Error);
  CHECK_THROWS_AS(bad(R"({"nodes":[{"id":1},{"id":2}],"edges":[{"a":"1","b":2}]})"), Error);
}

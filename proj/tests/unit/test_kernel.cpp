#include <catch2/catch.hpp>

#include <Eigen/Dense>

#include "grammargen/kernel.hpp"
#include "support/graphs.hpp"

using namespace grammargen;
using grammargen::testing::path;

namespace {

const KernelParams kSmall{1, 2, 16};

}  // namespace

TEST_CASE("vectorize basics", "[kernel]") {
  LabeledGraph one;
  one.add_node("a");
  const auto v = vectorize(one, KernelParams{0, 0, 16});
  REQUIRE(v.entries.size() == 1);
  CHECK(v.entries[0].second == 1.0);
  CHECK_THROWS_AS(vectorize(LabeledGraph{}), Error);
  CHECK_THROWS_AS(vectorize(one, KernelParams{0, 0, 4}), Error);
}

TEST_CASE("cosine of two paths by hand", "[kernel]") {
  // r=0, d=1: nodes {a,b,c} and edges {ab, bc} vs {a,b,d} and {ab, bd};
  // three of five unit features shared -> 3/5
  const KernelParams p{0, 1, 16};
  CHECK(kernel(path({"a", "b", "c"}), path({"a", "b", "d"}), p) == Approx(0.6).epsilon(1e-12));
}

TEST_CASE("kernel self, symmetry and disjoint alphabets", "[kernel]") {
  Rng rng(2);
  for (int k = 0; k < 100; ++k) {
    const auto g = grammargen::testing::random_connected_graph(rng, 1 + rng.uniform_index(12), rng.uniform_index(4));
    const auto h = grammargen::testing::random_connected_graph(rng, 1 + rng.uniform_index(12), rng.uniform_index(4));
    REQUIRE(std::abs(kernel(g, g) - 1.0) <= 1e-9);
    REQUIRE(kernel(g, h, kSmall) == kernel(h, g, kSmall));
  }
  CHECK(kernel(path({"a", "b"}), path({"x", "y", "z"})) == 0.0);
}

TEST_CASE("vectorize is invariant under node permutation", "[kernel][property]") {
  Rng rng(5);
  for (int k = 0; k < 60; ++k) {
    const auto g = grammargen::testing::random_graph(rng, 2 + rng.uniform_index(10), 0.35, {"a", "b", "c"}, {"", "x"});
    const auto perm = grammargen::testing::random_permutation(rng, g.node_count());
    REQUIRE(vectorize(g) == vectorize(grammargen::testing::permuted(g, perm, rng)));
  }
}

TEST_CASE("Gram matrices are positive semidefinite", "[kernel][property]") {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<LabeledGraph> set;
    for (int k = 0; k < 10; ++k) set.push_back(grammargen::testing::random_connected_graph(rng, 3 + rng.uniform_index(8), 2));
    const auto vs = vectorize_all(set);
    Eigen::MatrixXd gram(10, 10);
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j) gram(i, j) = dot(vs[i], vs[j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram, Eigen::EigenvaluesOnly);
    REQUIRE(solver.eigenvalues().minCoeff() >= -1e-8);
  }
}

TEST_CASE("set similarity", "[kernel]") {
  const auto g = path({"a", "b", "c"});
  const std::vector<LabeledGraph> single{g}, doubled{g, g};
  CHECK(std::abs(set_similarity(std::span<const LabeledGraph>(single), doubled) - 1.0) <= 1e-12);

  Rng rng(4);
  std::vector<LabeledGraph> a, b;
  for (int k = 0; k < 6; ++k) a.push_back(grammargen::testing::random_connected_graph(rng, 5, 1));
  for (int k = 0; k < 4; ++k) b.push_back(grammargen::testing::random_connected_graph(rng, 7, 2));
  CHECK(set_similarity(std::span<const LabeledGraph>(a), a) == 1.0);
  const double ab = set_similarity(std::span<const LabeledGraph>(a), b);
  CHECK(ab == set_similarity(std::span<const LabeledGraph>(b), a));
  CHECK(ab > 0.0);
  CHECK(ab <= 1.0);

  const std::vector<LabeledGraph> x{path({"x", "y"})};
  CHECK(set_similarity(std::span<const LabeledGraph>(single), x) == 0.0);
  const std::vector<LabeledGraph> none;
  CHECK_THROWS_AS(set_similarity(std::span<const LabeledGraph>(none), single), Error);
}

TEST_CASE("internal diversity", "[kernel]") {
  const auto g = path({"a", "b", "c"});
  const std::vector<LabeledGraph> copies{g, g, g};
  CHECK(internal_diversity(std::span<const LabeledGraph>(copies)).intdiv1 == Approx(0.0).margin(1e-12));
  const std::vector<LabeledGraph> disjoint{path({"a", "b"}), path({"x", "y"})};
  const auto d = internal_diversity(std::span<const LabeledGraph>(disjoint));
  CHECK(d.intdiv1 == Approx(0.5));
  CHECK(d.intdiv2 == Approx(1.0 - std::sqrt(0.5)));
  Rng rng(3);
  std::vector<LabeledGraph> set;
  for (int k = 0; k < 8; ++k) set.push_back(grammargen::testing::random_connected_graph(rng, 6, 2));
  const auto r = internal_diversity(std::span<const LabeledGraph>(set));
  CHECK(r.intdiv1 >= 0.0);
  CHECK(r.intdiv1 < 1.0);
}

TEST_CASE("svmlight lines", "[kernel]") {
  SparseVector v;
  v.entries = {{3, 0.5}, {17, 0.25}};
  CHECK(to_svmlight(v) == "3:0.5 17:0.25");
  CHECK(to_svmlight(SparseVector{}).empty());
}

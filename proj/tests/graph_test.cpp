#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <utility>
#include <vector>

#include "pcm/graph.hpp"
#include "pcm/matrix.hpp"

namespace {

const char* kIncomplete4 =
    "1 2 ? 1/6\n"
    "1/2 1 5 1\n"
    "? 1/5 1 ?\n"
    "6 1 ? 1\n";

pcm::ComparisonGraph plain_graph(int n, std::vector<std::pair<int, int>> pairs) {
  std::vector<pcm::Edge> edges;
  for (auto [u, v] : pairs) edges.push_back({u, v, 1.0});
  return pcm::ComparisonGraph(n, std::move(edges));
}

std::uint64_t pow_u64(std::uint64_t base, int exp) {
  std::uint64_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

pcm::ComparisonGraph complete_graph(int n) {
  std::vector<std::pair<int, int>> pairs;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) pairs.push_back({i, j});
  return plain_graph(n, pairs);
}

}  // namespace

TEST_CASE("induce_graph lists known comparisons in lexicographic order") {
  pcm::ComparisonGraph g = pcm::induce_graph(pcm::parse_matrix(kIncomplete4));
  REQUIRE(g.edges().size() == 4);
  std::vector<std::pair<int, int>> expected{{0, 1}, {0, 3}, {1, 2}, {1, 3}};
  for (std::size_t k = 0; k < expected.size(); ++k) {
    CHECK(g.edges()[k].u == expected[k].first);
    CHECK(g.edges()[k].v == expected[k].second);
  }
  CHECK(g.edges()[0].value == 2.0);
  CHECK(g.edges()[2].value == 5.0);
}

TEST_CASE("laplacian") {
  pcm::ComparisonGraph g = pcm::induce_graph(pcm::parse_matrix(kIncomplete4));
  std::vector<std::vector<std::int64_t>> expected{
      {2, -1, 0, -1}, {-1, 3, -1, -1}, {0, -1, 1, 0}, {-1, -1, 0, 2}};
  CHECK(pcm::laplacian(g) == expected);
}

TEST_CASE("connectivity") {
  CHECK(pcm::is_connected(pcm::induce_graph(pcm::parse_matrix(kIncomplete4))));
  CHECK(!pcm::is_connected(plain_graph(3, {{0, 1}})));
  CHECK(pcm::is_connected(plain_graph(1, {})));
}

TEST_CASE("count_spanning_trees") {
  CHECK(pcm::count_spanning_trees(pcm::induce_graph(pcm::parse_matrix(kIncomplete4))) == 3);
  CHECK(pcm::count_spanning_trees(complete_graph(4)) == 16);

  SUBCASE("Cayley's formula") {
    for (int n = 2; n <= 8; ++n)
      CHECK(pcm::count_spanning_trees(complete_graph(n)) == pow_u64(n, n - 2));
  }
  SUBCASE("degenerate shapes") {
    CHECK(pcm::count_spanning_trees(plain_graph(1, {})) == 1);
    CHECK(pcm::count_spanning_trees(plain_graph(3, {{0, 1}})) == 0);  // disconnected
    CHECK(pcm::count_spanning_trees(plain_graph(4, {{0, 1}, {1, 2}, {2, 3}})) == 1);  // path
    CHECK(pcm::count_spanning_trees(plain_graph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {0, 4}})) ==
          5);  // cycle
  }
}

TEST_CASE("enumeration visits every tree exactly once, in a fixed order") {
  pcm::ComparisonGraph g = pcm::induce_graph(pcm::parse_matrix(kIncomplete4));
  std::vector<pcm::SpanningTree> trees = pcm::enumerate_spanning_trees(g);
  REQUIRE(trees.size() == 3);
  // Edge order (0,1) (0,3) (1,2) (1,3); the take-the-edge branch first.
  pcm::SpanningTree t0{{0, 1}, {0, 3}, {1, 2}};
  pcm::SpanningTree t1{{0, 1}, {1, 2}, {1, 3}};
  pcm::SpanningTree t2{{0, 3}, {1, 2}, {1, 3}};
  CHECK(trees[0] == t0);
  CHECK(trees[1] == t1);
  CHECK(trees[2] == t2);

  SUBCASE("complete graph count") {
    CHECK(pcm::enumerate_spanning_trees(complete_graph(5)).size() == 125);
  }
  SUBCASE("single vertex has one empty tree") {
    std::vector<pcm::SpanningTree> t = pcm::enumerate_spanning_trees(plain_graph(1, {}));
    REQUIRE(t.size() == 1);
    CHECK(t[0].empty());
  }
}

TEST_CASE("enumeration matches the Kirchhoff count on random connected graphs") {
  std::mt19937 rng(20240817);
  for (int round = 0; round < 60; ++round) {
    int n = 2 + static_cast<int>(rng() % 5);  // up to 6 vertices
    // Random spanning tree first so the graph is connected, then extras.
    std::vector<std::pair<int, int>> pairs;
    for (int v = 1; v < n; ++v) pairs.push_back({static_cast<int>(rng() % v), v});
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (rng() % 2 == 0) pairs.push_back({i, j});
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    pcm::ComparisonGraph g = plain_graph(n, pairs);
    CAPTURE(n);
    CHECK(pcm::enumerate_spanning_trees(g).size() == pcm::count_spanning_trees(g));
  }
}

TEST_CASE("enumeration errors") {
  SUBCASE("disconnected graph") {
    CHECK_THROWS_AS(pcm::enumerate_spanning_trees(plain_graph(3, {{0, 1}})),
                    pcm::DisconnectedGraphError);
  }
  SUBCASE("cap exceeded, checked before any visit") {
    pcm::ComparisonGraph g = pcm::induce_graph(pcm::parse_matrix(kIncomplete4));
    int visited = 0;
    try {
      pcm::for_each_spanning_tree(g, [&](const pcm::SpanningTree&) { ++visited; }, 2);
      FAIL("expected TreeCountExceedsCapError");
    } catch (const pcm::TreeCountExceedsCapError& e) {
      CHECK(e.count() == 3);
      CHECK(e.cap() == 2);
    }
    CHECK(visited == 0);
    CHECK(pcm::enumerate_spanning_trees(g, 3).size() == 3);  // cap == count is fine
  }
}

TEST_CASE("PCM_TREE_CAP environment override") {
  CHECK(pcm::tree_cap_from_env() == pcm::kDefaultTreeCap);
  setenv("PCM_TREE_CAP", "2", 1);
  CHECK(pcm::tree_cap_from_env() == 2);
  pcm::ComparisonGraph g = pcm::induce_graph(pcm::parse_matrix(kIncomplete4));
  CHECK_THROWS_AS(pcm::enumerate_spanning_trees(g), pcm::TreeCountExceedsCapError);
  setenv("PCM_TREE_CAP", "bogus", 1);
  CHECK(pcm::tree_cap_from_env() == pcm::kDefaultTreeCap);
  unsetenv("PCM_TREE_CAP");
  CHECK(pcm::enumerate_spanning_trees(g).size() == 3);
}

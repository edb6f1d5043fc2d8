#include <catch2/catch_amalgamated.hpp>

#include "graphonlab/rng.hpp"
#include "graphonlab/smallgraph.hpp"

using namespace graphonlab;

TEST_CASE("graph text format") {
  SmallGraph c4 = SmallGraph::parse("4:0-1,1-2,2-3,3-0");
  CHECK(c4.order() == 4);
  CHECK(c4.edge_count() == 4);
  CHECK(c4.has_edge(0, 1));
  CHECK_FALSE(c4.has_edge(0, 2));
  CHECK(SmallGraph::parse(c4.str()) == c4);
  CHECK(SmallGraph::parse("3:").order() == 3);
  CHECK(SmallGraph::parse("1").order() == 1);

  CHECK_THROWS_AS(SmallGraph::parse("4:0-4"), GraphParseError);
  CHECK_THROWS_AS(SmallGraph::parse("4:0-0"), GraphParseError);
  CHECK_THROWS_AS(SmallGraph::parse("4:0-1,0-1"), GraphParseError);
  CHECK_THROWS_AS(SmallGraph::parse("4:0-1,"), GraphParseError);
  CHECK_THROWS_AS(SmallGraph::parse("abc"), GraphParseError);
  try {
    SmallGraph::parse("4:0-1,x");
    FAIL("expected parse error");
  } catch (const GraphParseError& e) {
    CHECK(e.position == 6);
  }
}

TEST_CASE("canonical form is isomorphism invariant") {
  Rng rng(42);
  for (int n = 2; n <= 7; ++n) {
    for (int trial = 0; trial < 30; ++trial) {
      SmallGraph g(n);
      for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
          if (rng.uniform() < 0.4) g.add_edge(u, v);
      SmallGraph canon = canonical_form(g);
      std::array<int, SmallGraph::kMaxVertices> perm{};
      std::vector<int> p(n);
      for (int i = 0; i < n; ++i) p[i] = i;
      for (int s = n - 1; s > 0; --s) std::swap(p[s], p[rng.below(s + 1)]);
      for (int i = 0; i < n; ++i) perm[i] = p[i];
      CHECK(canonical_form(g.relabel(perm)) == canon);
      CHECK(isomorphic(g, g.relabel(perm)));
    }
  }
}

TEST_CASE("isomorphism distinguishes non-isomorphic graphs") {
  CHECK_FALSE(isomorphic(path_graph(4), cycle_graph(4)));
  CHECK_FALSE(isomorphic(SmallGraph::parse("4:0-1,2-3"), SmallGraph::parse("4:0-1,1-2")));
  CHECK(isomorphic(SmallGraph::parse("4:0-1,2-3"), SmallGraph::parse("4:0-3,1-2")));
}

TEST_CASE("automorphism counts") {
  CHECK(automorphism_count(complete_graph(4)) == 24);
  CHECK(automorphism_count(cycle_graph(4)) == 8);
  CHECK(automorphism_count(cycle_graph(5)) == 10);
  CHECK(automorphism_count(path_graph(3)) == 2);
  CHECK(automorphism_count(SmallGraph(3)) == 6);
}

TEST_CASE("enumeration counts match the known sequence") {
  CHECK(enumerate_all(1).size() == 1);
  CHECK(enumerate_all(2).size() == 2);
  CHECK(enumerate_all(3).size() == 4);
  CHECK(enumerate_all(4).size() == 11);
  CHECK(enumerate_all(5).size() == 34);
  CHECK(enumerate_all(6).size() == 156);
}

TEST_CASE("connected enumeration") {
  auto up_to_3 = enumerate_connected(3);
  CHECK(up_to_3.size() == 3);  // K2, P3, K3
  auto up_to_4 = enumerate_connected(4);
  CHECK(up_to_4.size() == 9);  // adds P4, the star K_{1,3}, C4, paw, diamond, K4
  for (const auto& g : up_to_4) {
    CHECK(g.connected());
    CHECK(g.order() >= 2);
    CHECK(g.order() <= 4);
    CHECK(canonical_form(g) == g);
  }
  CHECK_THROWS_AS(enumerate_connected(9), SizeError);
}

TEST_CASE("labelled copies") {
  CHECK(labelled_copies(cycle_graph(4)).size() == 3);
  CHECK(labelled_copies(complete_graph(4)).size() == 1);
  CHECK(labelled_copies(path_graph(3)).size() == 3);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>

#include "gibbs/lattice.hpp"
#include "gibbs/model.hpp"
#include "gibbs/percolation.hpp"
#include "gibbs/rng.hpp"
#include "gibbs/small_graphs.hpp"

using namespace gibbs;

TEST_CASE("box construction basics") {
  Graph square = Graph::box(2, 2, Topology::free);
  CHECK(square.num_vertices() == 4);
  CHECK(square.num_bonds() == 4);

  Graph path = Graph::box(1, 5, Topology::free);
  CHECK(path.num_vertices() == 5);
  CHECK(path.num_bonds() == 4);
  CHECK(path.degree(0) == 1);
  CHECK(path.degree(2) == 2);

  CHECK_THROWS(Graph::box(2, 2, Topology::periodic));
  CHECK_THROWS(Graph::box(0, 3, Topology::free));

  Graph torus = Graph::box(2, 3, Topology::periodic);
  CHECK(torus.num_vertices() == 9);
  for (int v = 0; v < 9; ++v) CHECK(torus.degree(v) == 4);
  CHECK(torus.num_bonds() == 18);
}

TEST_CASE("box bond-count formula") {
  for (int d = 1; d <= 3; ++d)
    for (int n = 1; n <= (d == 3 ? 8 : 16); ++n) {
      Graph g = Graph::box(d, n, Topology::free);
      int64_t expect = 1;
      for (int i = 0; i < d - 1; ++i) expect *= n;
      expect *= d * (n - 1);
      CHECK(g.num_bonds() == expect);
    }
}

TEST_CASE("interior degree of a box is 2d") {
  Graph g = Graph::box(3, 5, Topology::free);
  CHECK(g.degree(g.index_of({2, 2, 2})) == 6);
  CHECK(g.degree(g.index_of({0, 0, 0})) == 3);
}

TEST_CASE("boundary of regions") {
  Graph g = Graph::box(2, 5, Topology::free);
  VertexId center = g.index_of({2, 2});
  Region single({center}, g.num_vertices());
  Region bd = boundary(g, single);
  CHECK(bd.size() == 4);
  for (VertexId v : bd.members()) {
    auto c = g.coords_of(v);
    CHECK(std::abs(c[0] - 2) + std::abs(c[1] - 2) == 1);
  }

  CHECK(boundary(g, Region::all(g.num_vertices())).empty());

  // 3x3 center block: ring of 12 sites, corners excluded
  std::vector<VertexId> block;
  for (int i = 1; i <= 3; ++i)
    for (int j = 1; j <= 3; ++j) block.push_back(g.index_of({i, j}));
  Region lambda(block, g.num_vertices());
  Region ring = boundary(g, lambda);
  CHECK(ring.size() == 12);
  for (VertexId v : ring.members()) {
    auto c = g.coords_of(v);
    bool corner = (c[0] == 0 || c[0] == 4) && (c[1] == 0 || c[1] == 4);
    CHECK(!corner);
  }
  for (VertexId v : ring.members()) CHECK(!lambda.contains(v));
}

TEST_CASE("bond sets") {
  Graph g = Graph::box(2, 5, Topology::free);
  Region single({g.index_of({2, 2})}, g.num_vertices());
  BondSets sets = bond_sets(g, single);
  CHECK(sets.inner.empty());
  CHECK(sets.touching.size() == 4);

  BondSets all = bond_sets(g, Region::all(g.num_vertices()));
  CHECK(int(all.inner.size()) == g.num_bonds());
  CHECK(int(all.touching.size()) == g.num_bonds());

  Graph g4 = Graph::box(2, 4, Topology::free);
  std::vector<VertexId> corner;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) corner.push_back(g4.index_of({i, j}));
  BondSets cs = bond_sets(g4, Region(corner, g4.num_vertices()));
  CHECK(cs.inner.size() == 4);
  CHECK(cs.touching.size() == 8);
}

TEST_CASE("touching minus inner bonds have exactly one endpoint inside") {
  Graph g = Graph::box(2, 6, Topology::free);
  Rng rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<VertexId> members;
    for (int v = 0; v < g.num_vertices(); ++v)
      if (rng.next_bernoulli(0.4)) members.push_back(v);
    Region lambda(members, g.num_vertices());
    BondSets sets = bond_sets(g, lambda);
    std::set<BondId> inner(sets.inner.begin(), sets.inner.end());
    for (BondId b : sets.touching) {
      int inside = int(lambda.contains(g.bond(b).u)) +
                   int(lambda.contains(g.bond(b).v));
      if (inner.count(b))
        CHECK(inside == 2);
      else
        CHECK(inside == 1);
    }
  }
}

TEST_CASE("doubly-rooted tree") {
  Graph t = Graph::tree(2, 3);
  CHECK(t.num_vertices() == 14);  // 2 + 4 + 8
  CHECK(t.degree(0) == 3);        // both roots carry full degree d+1
  CHECK(t.degree(1) == 3);
  Region leaves = t.leaves();
  CHECK(leaves.size() == 8);
  for (int v = 0; v < t.num_vertices(); ++v) {
    if (leaves.contains(v))
      CHECK(t.degree(v) == 1);
    else
      CHECK(t.degree(v) == 3);
  }
}

TEST_CASE("triangular lattice is not bipartite") {
  Graph tri = Graph::triangular(4);
  CHECK(tri.num_vertices() == 16);
  CHECK_THROWS(two_coloring(tri));
  Graph box = Graph::box(2, 4, Topology::free);
  CHECK_NOTHROW(two_coloring(box));
}

TEST_CASE("custom graph validation") {
  CHECK_THROWS(Graph::custom(3, {{0, 0}}));          // self loop
  CHECK_THROWS(Graph::custom(3, {{0, 1}, {1, 0}}));  // duplicate
  CHECK_THROWS(Graph::custom(2, {{0, 5}}));          // out of range
  Graph g = Graph::custom(3, {{2, 0}, {1, 2}});
  CHECK(g.bond(0).u == 0);  // endpoints normalized
  CHECK(g.num_bonds() == 2);
}

TEST_CASE("descriptor round trip") {
  std::vector<Graph> graphs = {
      Graph::box(2, 4, Topology::free), Graph::box(2, 3, Topology::periodic),
      Graph::tree(2, 2), Graph::triangular(3),
      Graph::custom(4, {{0, 1}, {1, 2}, {2, 3}, {0, 3}})};
  for (const Graph& g : graphs) {
    Graph back = Graph::parse_descriptor(g.descriptor());
    CHECK(back.num_vertices() == g.num_vertices());
    REQUIRE(back.num_bonds() == g.num_bonds());
    for (int b = 0; b < g.num_bonds(); ++b) {
      CHECK(back.bond(b).u == g.bond(b).u);
      CHECK(back.bond(b).v == g.bond(b).v);
    }
  }
  CHECK_THROWS(Graph::parse_descriptor("pentagon 5"));
}

TEST_CASE("small connected graph catalog") {
  std::vector<Graph> graphs = connected_graphs_up_to(6);
  std::vector<int> by_edges(7, 0);
  for (const Graph& g : graphs) ++by_edges[g.num_bonds()];
  CHECK(by_edges[1] == 1);
  CHECK(by_edges[2] == 1);
  CHECK(by_edges[3] == 3);
  CHECK(by_edges[4] == 5);
  CHECK(by_edges[5] == 12);
  CHECK(by_edges[6] == 30);
  CHECK(graphs.size() == 52);
  for (const Graph& g : graphs) {
    UnionFind uf(g.num_vertices());
    for (const Bond& b : g.bonds()) uf.unite(b.u, b.v);
    CHECK(uf.count() == 1);
  }
}

#include <map>
#include <set>

#include "doctest.h"
#include "gvb/graph.hpp"

using namespace gvb;

namespace {

// Integer adjacency matrix; independent of the graph's walk code.
std::vector<std::vector<long long>> adjacency(const RegularGraph& g) {
  const auto n = static_cast<size_t>(g.vertex_count());
  std::vector<std::vector<long long>> A(n, std::vector<long long>(n, 0));
  for (const auto& e : g.edges()) A[static_cast<size_t>(e.head)][static_cast<size_t>(e.tail)] += 1;
  return A;
}

long long closed_walks_oracle(const RegularGraph& g, int x, int k) {
  const auto A = adjacency(g);
  const size_t n = A.size();
  std::vector<long long> v(n, 0);
  v[static_cast<size_t>(x)] = 1;
  for (int s = 0; s < k; ++s) {
    std::vector<long long> w(n, 0);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) w[i] += A[i][j] * v[j];
    v = w;
  }
  return v[static_cast<size_t>(x)];
}

}  // namespace

TEST_CASE("named graphs are regular with the expected sizes") {
  const RegularGraph p = petersen_graph();
  CHECK(p.degree() == 3);
  CHECK(p.vertex_count() == 10);
  CHECK(p.oriented_edge_count() == 30);
  const RegularGraph b = bouquet_graph(3);
  CHECK(b.degree() == 6);
  CHECK(b.vertex_count() == 1);
  const RegularGraph c = cycle_graph(4);
  CHECK(c.degree() == 2);
  CHECK(c.vertex_count() == 4);
  CHECK(complete_graph(5).degree() == 4);
  for (const auto& g : {p, b, c})
    for (const auto& e : g.edges()) {
      CHECK(g.reversal(g.reversal(e.id)) == e.id);
      CHECK(g.edge(e.reversal).head == e.tail);
      CHECK(g.out_edges(e.tail)[static_cast<size_t>(g.out_position(e.id))] == e.id);
    }
}

TEST_CASE("build_graph rejects malformed input") {
  // irregular: path on 3 vertices
  CHECK_THROWS_AS(graph_from_undirected(1, 3, {{0, 1}, {1, 2}}), InvalidInput);
  // disconnected: two 2-cycles
  CHECK_THROWS_AS(graph_from_undirected(2, 4, {{0, 1}, {1, 0}, {2, 3}, {3, 2}}), InvalidInput);
  // broken involution
  std::vector<OrientedEdge> e = {{1, 0, 0, 1}, {0, 1, 1, 1}};
  CHECK_THROWS_AS(build_graph(1, e), InvalidInput);
  // reversal with wrong endpoints
  std::vector<OrientedEdge> f = {{1, 0, 0, 1}, {1, 0, 1, 0}};
  CHECK_THROWS_AS(build_graph(1, f), InvalidInput);
}

TEST_CASE("girth and injectivity radius") {
  CHECK(girth(petersen_graph()) == 5);
  CHECK(girth(cycle_graph(4)) == 4);
  CHECK(girth(cycle_graph(7)) == 7);
  CHECK(girth(bouquet_graph(3)) == 1);
  CHECK(girth(complete_graph(4)) == 3);
  for (int x = 0; x < 10; ++x) CHECK(injectivity_radius(petersen_graph(), x) == 2);
  for (int x = 0; x < 4; ++x) CHECK(injectivity_radius(cycle_graph(4), x) == 1);
  CHECK(injectivity_radius(bouquet_graph(3), 0) == 0);
}

TEST_CASE("injectivity radius agrees with brute-force endpoint collisions") {
  for (const auto& g : {petersen_graph(), cycle_graph(5), cycle_graph(6), complete_graph(4)}) {
    for (int x = 0; x < g.vertex_count(); ++x) {
      int r = 0;
      for (;; ++r) {
        std::set<int> heads;
        size_t total = 0;
        for (int k = 0; k <= r + 1; ++k)
          for (const auto& p : enumerate_nb_paths(g, x, k)) {
            heads.insert(p.head(g));
            ++total;
          }
        if (heads.size() != total) break;
      }
      CHECK(injectivity_radius(g, x) == r);
    }
  }
}

TEST_CASE("Benjamini-Schramm profile") {
  const auto pp = bs_profile(petersen_graph(), 2);
  CHECK(pp == std::vector<double>{0, 0, 1});
  const auto cp = bs_profile(cycle_graph(4), 1);
  CHECK(cp == std::vector<double>{0, 1});
  CHECK(bs_profile(petersen_graph(), 6).back() == 1.0);
}

TEST_CASE("tree walk counts") {
  CHECK(tree_closed_walks(3, 0) == 1);
  CHECK(tree_closed_walks(3, 2) == 3);
  CHECK(tree_closed_walks(3, 4) == 15);
  CHECK(tree_closed_walks(5, 7) == 0);
  CHECK(tree_first_returns(3, 1) == 3);
  CHECK(tree_first_returns(3, 2) == 6);
  CHECK(tree_first_returns(14, 1) == 14);
  CHECK(tree_sphere_size(3, 0) == 1);
  CHECK(tree_sphere_size(3, 3) == 12);
  CHECK(tree_ball_size(3, 2) == 10);
  // exact big-integer arithmetic beyond 64 bits
  CHECK(tree_closed_walks(14, 40) > BigInt(1) << 100);
}

TEST_CASE("tree closed walks agree with walks below the girth") {
  const RegularGraph g = petersen_graph();
  for (int k = 0; k < 5; ++k)
    CHECK(BigInt(closed_walks_oracle(g, 0, k)) == tree_closed_walks(3, k));
}

TEST_CASE("first returns: brute force on a large-girth neighbourhood") {
  // On the Petersen graph walks of length 4 stay below the girth, so first
  // returns at length 4 are tree first returns.
  const RegularGraph g = petersen_graph();
  int first = 0;
  for (const auto& w : enumerate_closed_walks(g, 0, 4)) {
    int at = 0;
    bool early = false;
    for (size_t i = 0; i + 1 < w.size(); ++i) {
      at = g.edge(w[i]).head;
      if (at == 0) early = true;
    }
    if (!early) ++first;
  }
  CHECK(BigInt(first) == tree_first_returns(3, 2));
}

TEST_CASE("nonbacktracking path enumeration") {
  const RegularGraph p = petersen_graph();
  CHECK(enumerate_nb_paths(p, 0, 0).size() == 1);
  CHECK(enumerate_nb_paths(p, 3, 2).size() == 6);
  CHECK(enumerate_nb_paths(p, 3, 4).size() == 24);
  CHECK(enumerate_nb_paths(bouquet_graph(3), 0, 1).size() == 6);
  for (const auto& path : enumerate_nb_paths(p, 0, 3)) CHECK(is_nonbacktracking(p, path.edges));
}

TEST_CASE("closed walks") {
  CHECK(enumerate_closed_walks(cycle_graph(4), 0, 2).size() == 2);
  CHECK(enumerate_closed_walks(petersen_graph(), 0, 2).size() == 3);
  const RegularGraph p = petersen_graph();
  for (int k = 0; k <= 6; ++k)
    CHECK(static_cast<long long>(enumerate_closed_walks(p, 4, k).size()) == closed_walks_oracle(p, 4, k));
  // length 5: only the 5-cycles through x, each in two directions
  CHECK(enumerate_closed_walks(p, 0, 5).size() == 2 * 6);
  CHECK_THROWS_AS(enumerate_closed_walks(complete_graph(6), 0, 12, 1e3), BudgetExceeded);
}

TEST_CASE("word reduction cancels backtracks") {
  const RegularGraph g = petersen_graph();
  const int e = g.out_edges(0)[0];
  const int f = g.out_edges(g.edge(e).head)[0] == g.reversal(e) ? g.out_edges(g.edge(e).head)[1]
                                                               : g.out_edges(g.edge(e).head)[0];
  const std::vector<int> w = {e, f, g.reversal(f), g.reversal(e)};
  CHECK(reduce_word(g, w).empty());
  const std::vector<int> v = {e, f};
  CHECK(reduce_word(g, v) == v);
}

TEST_CASE("spanning trees") {
  CHECK(spanning_tree(cycle_graph(4)).edges().size() == 3);
  CHECK(spanning_tree(petersen_graph()).edges().size() == 9);
  CHECK(spanning_tree(bouquet_graph(3)).edges().empty());
  const auto t = spanning_tree(petersen_graph(), 4);
  CHECK(t.root == 4);
  CHECK(t.parent_edge[4] == -1);
  for (int v = 0; v < 10; ++v)
    if (v != 4) CHECK(petersen_graph().edge(t.parent_edge[static_cast<size_t>(v)]).head == v);
}

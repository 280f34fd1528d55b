#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "gvb/types.hpp"

namespace gvb {

using BigInt = boost::multiprecision::cpp_int;

/// One oriented edge tail -> head. Self-loops are two distinct half-edges
/// exchanged by `reversal`.
struct OrientedEdge {
  int head = 0;
  int tail = 0;
  int id = 0;
  int reversal = 0;
};

/// Finite connected d-regular multigraph with an oriented-edge involution.
///
/// Edge ids are dense in [0, 2E). Every vertex has exactly d outgoing
/// oriented edges; `out_edges(v)` lists them in ascending id order.
class RegularGraph {
 public:
  RegularGraph() = default;

  int degree() const { return degree_; }
  int vertex_count() const { return static_cast<int>(out_.size()); }
  int oriented_edge_count() const { return static_cast<int>(edges_.size()); }

  const OrientedEdge& edge(int id) const { return edges_[static_cast<size_t>(id)]; }
  std::span<const OrientedEdge> edges() const { return edges_; }
  std::span<const int> out_edges(int v) const { return out_[static_cast<size_t>(v)]; }
  int reversal(int id) const { return edges_[static_cast<size_t>(id)].reversal; }
  /// Position of `id` within out_edges(tail(id)).
  int out_position(int id) const { return out_pos_[static_cast<size_t>(id)]; }

  friend RegularGraph build_graph(int d, std::vector<OrientedEdge> edges);

 private:
  int degree_ = 0;
  std::vector<OrientedEdge> edges_;
  std::vector<std::vector<int>> out_;
  std::vector<int> out_pos_;
};

/// Validates and builds a graph. Throws InvalidInput naming the offending
/// vertex or edge on irregularity, a broken involution, or disconnection.
RegularGraph build_graph(int d, std::vector<OrientedEdge> edges);

/// Convenience: undirected edge list (u, v) -> both orientations; u == v is a loop.
RegularGraph graph_from_undirected(int d, int vertex_count,
                                   const std::vector<std::pair<int, int>>& undirected);

RegularGraph petersen_graph();
RegularGraph cycle_graph(int n);
/// Single vertex with `loops` self-loops (degree 2*loops).
RegularGraph bouquet_graph(int loops);
RegularGraph complete_graph(int n);

/// Nonbacktracking path as edge ids e_1..e_k (e_1 leaves the tail vertex).
struct NbPath {
  int start = 0;           ///< tail vertex (also the whole path when k = 0)
  std::vector<int> edges;  ///< e_1, ..., e_k

  int length() const { return static_cast<int>(edges.size()); }
  int tail() const { return start; }
  int head(const RegularGraph& g) const { return edges.empty() ? start : g.edge(edges.back()).head; }
};

bool is_nonbacktracking(const RegularGraph& g, std::span<const int> edges);

int girth(const RegularGraph& g);
int injectivity_radius(const RegularGraph& g, int x);
/// Fraction of vertices with inj_x <= k, for k = 0..k_max.
std::vector<double> bs_profile(const RegularGraph& g, int k_max);

BigInt tree_closed_walks(int d, int k);
BigInt tree_first_returns(int d, int k);
/// |∂B(o,k)| on the d-regular tree.
std::int64_t tree_sphere_size(int d, int k);
std::int64_t tree_ball_size(int d, int k);

std::vector<NbPath> enumerate_nb_paths(const RegularGraph& g, int x, int k);

/// Closed walk at x: edge ids in traversal order, backtracking allowed.
using Walk = std::vector<int>;
inline constexpr double kDefaultWalkBudget = 1e7;
std::vector<Walk> enumerate_closed_walks(const RegularGraph& g, int x, int k,
                                         double budget = kDefaultWalkBudget);

/// Free reduction of an edge word (cancel e, reversal(e) adjacent pairs).
std::vector<int> reduce_word(const RegularGraph& g, std::span<const int> edges);

/// BFS tree from `root`.
struct SpanningTree {
  int root = 0;
  std::vector<int> parent_edge;  ///< oriented parent->child edge id per vertex, -1 at root
  std::vector<int> order;        ///< BFS visiting order
  std::vector<int> edges() const;
};

SpanningTree spanning_tree(const RegularGraph& g, int root = 0);

}  // namespace gvb

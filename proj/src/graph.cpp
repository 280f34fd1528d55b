#include "gvb/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace gvb {

RegularGraph build_graph(int d, std::vector<OrientedEdge> edges) {
  if (d < 1) throw InvalidInput("degree must be positive, got " + std::to_string(d));
  const int m = static_cast<int>(edges.size());
  if (m == 0) throw InvalidInput("graph has no edges");
  int n = 0;
  for (int i = 0; i < m; ++i) {
    const auto& e = edges[static_cast<size_t>(i)];
    if (e.id != i) throw InvalidInput("oriented edge ids must be dense and ordered; edge at position " +
                                      std::to_string(i) + " has id " + std::to_string(e.id));
    if (e.head < 0 || e.tail < 0) throw InvalidInput("negative vertex on edge " + std::to_string(i));
    n = std::max({n, e.head + 1, e.tail + 1});
  }
  for (const auto& e : edges) {
    if (e.reversal < 0 || e.reversal >= m)
      throw InvalidInput("edge " + std::to_string(e.id) + " has unpaired reversal " + std::to_string(e.reversal));
    if (e.reversal == e.id)
      throw InvalidInput("edge " + std::to_string(e.id) + " is its own reversal");
    const auto& r = edges[static_cast<size_t>(e.reversal)];
    if (r.reversal != e.id || r.head != e.tail || r.tail != e.head)
      throw InvalidInput("edge " + std::to_string(e.id) + " and its reversal " + std::to_string(e.reversal) +
                         " do not form a valid involution pair");
  }

  RegularGraph g;
  g.degree_ = d;
  g.out_.assign(static_cast<size_t>(n), {});
  g.out_pos_.assign(static_cast<size_t>(m), 0);
  for (const auto& e : edges) g.out_[static_cast<size_t>(e.tail)].push_back(e.id);
  for (int v = 0; v < n; ++v) {
    const auto& out = g.out_[static_cast<size_t>(v)];
    if (static_cast<int>(out.size()) != d)
      throw InvalidInput("vertex " + std::to_string(v) + " has " + std::to_string(out.size()) +
                         " outgoing edges, expected " + std::to_string(d));
    for (int j = 0; j < d; ++j) g.out_pos_[static_cast<size_t>(out[static_cast<size_t>(j)])] = j;
  }
  g.edges_ = std::move(edges);

  std::vector<char> seen(static_cast<size_t>(n), 0);
  std::deque<int> queue{0};
  seen[0] = 1;
  int reached = 1;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int id : g.out_edges(v)) {
      const int w = g.edge(id).head;
      if (!seen[static_cast<size_t>(w)]) {
        seen[static_cast<size_t>(w)] = 1;
        ++reached;
        queue.push_back(w);
      }
    }
  }
  if (reached != n) {
    const auto it = std::find(seen.begin(), seen.end(), 0);
    throw InvalidInput("graph is disconnected: vertex " + std::to_string(it - seen.begin()) +
                       " is unreachable from vertex 0");
  }
  return g;
}

RegularGraph graph_from_undirected(int d, int vertex_count,
                                   const std::vector<std::pair<int, int>>& undirected) {
  std::vector<OrientedEdge> edges;
  edges.reserve(undirected.size() * 2);
  for (const auto& [u, v] : undirected) {
    if (u < 0 || v < 0 || u >= vertex_count || v >= vertex_count)
      throw InvalidInput("edge endpoint out of range");
    const int id = static_cast<int>(edges.size());
    edges.push_back({v, u, id, id + 1});
    edges.push_back({u, v, id + 1, id});
  }
  return build_graph(d, std::move(edges));
}

RegularGraph petersen_graph() {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < 5; ++i) {
    e.emplace_back(i, (i + 1) % 5);          // outer cycle
    e.emplace_back(i, i + 5);                // spokes
    e.emplace_back(i + 5, (i + 2) % 5 + 5);  // inner pentagram
  }
  return graph_from_undirected(3, 10, e);
}

RegularGraph cycle_graph(int n) {
  if (n < 3) throw InvalidInput("cycle needs at least 3 vertices");
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return graph_from_undirected(2, n, e);
}

RegularGraph bouquet_graph(int loops) {
  if (loops < 1) throw InvalidInput("bouquet needs at least one loop");
  std::vector<std::pair<int, int>> e(static_cast<size_t>(loops), {0, 0});
  return graph_from_undirected(2 * loops, 1, e);
}

RegularGraph complete_graph(int n) {
  if (n < 3) throw InvalidInput("complete graph needs at least 3 vertices");
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return graph_from_undirected(n - 1, n, e);
}

bool is_nonbacktracking(const RegularGraph& g, std::span<const int> edges) {
  for (size_t i = 1; i < edges.size(); ++i) {
    if (g.edge(edges[i - 1]).head != g.edge(edges[i]).tail) return false;
    if (g.reversal(edges[i - 1]) == edges[i]) return false;
  }
  return true;
}

int girth(const RegularGraph& g) {
  if (g.degree() <= 1) throw InvalidInput("girth undefined for degree <= 1");
  const int n = g.vertex_count();
  int best = -1;
  std::vector<int> dist(static_cast<size_t>(n));
  std::vector<int> via(static_cast<size_t>(n));
  for (int root = 0; root < n; ++root) {
    std::fill(dist.begin(), dist.end(), -1);
    std::fill(via.begin(), via.end(), -1);
    dist[static_cast<size_t>(root)] = 0;
    std::deque<int> queue{root};
    while (!queue.empty()) {
      const int u = queue.front();
      queue.pop_front();
      for (int id : g.out_edges(u)) {
        if (via[static_cast<size_t>(u)] >= 0 && id == g.reversal(via[static_cast<size_t>(u)])) continue;
        const int w = g.edge(id).head;
        if (dist[static_cast<size_t>(w)] < 0) {
          dist[static_cast<size_t>(w)] = dist[static_cast<size_t>(u)] + 1;
          via[static_cast<size_t>(w)] = id;
          queue.push_back(w);
        } else {
          const int len = dist[static_cast<size_t>(u)] + dist[static_cast<size_t>(w)] + 1;
          if (best < 0 || len < best) best = len;
        }
      }
    }
  }
  return best;
}

int injectivity_radius(const RegularGraph& g, int x) {
  const int n = g.vertex_count();
  std::vector<char> hit(static_cast<size_t>(n), 0);
  hit[static_cast<size_t>(x)] = 1;
  // frontier entries: (endpoint, last edge); last edge -1 for the empty path
  std::vector<std::pair<int, int>> frontier{{x, -1}};
  for (int r = 1;; ++r) {
    std::vector<std::pair<int, int>> next;
    next.reserve(frontier.size() * static_cast<size_t>(g.degree()));
    for (const auto& [v, last] : frontier) {
      for (int id : g.out_edges(v)) {
        if (last >= 0 && id == g.reversal(last)) continue;
        const int w = g.edge(id).head;
        if (hit[static_cast<size_t>(w)]) return r - 1;
        hit[static_cast<size_t>(w)] = 1;
        next.emplace_back(w, id);
      }
    }
    frontier = std::move(next);
  }
}

std::vector<double> bs_profile(const RegularGraph& g, int k_max) {
  const int n = g.vertex_count();
  std::vector<int> inj(static_cast<size_t>(n));
  for (int x = 0; x < n; ++x) inj[static_cast<size_t>(x)] = injectivity_radius(g, x);
  std::vector<double> out;
  for (int k = 0; k <= k_max; ++k) {
    const auto c = std::count_if(inj.begin(), inj.end(), [k](int r) { return r <= k; });
    out.push_back(static_cast<double>(c) / n);
  }
  return out;
}

BigInt tree_closed_walks(int d, int k) {
  if (d < 2) throw InvalidInput("tree_closed_walks needs d >= 2");
  if (k < 0) throw InvalidInput("walk length must be non-negative");
  // ways[h] = number of walks of the current length ending at height h
  std::vector<BigInt> ways(static_cast<size_t>(k) + 2, 0);
  ways[0] = 1;
  for (int step = 0; step < k; ++step) {
    std::vector<BigInt> next(ways.size(), 0);
    for (size_t h = 0; h + 1 < ways.size(); ++h) {
      if (ways[h] == 0) continue;
      next[h + 1] += ways[h] * (h == 0 ? d : d - 1);
      if (h > 0) next[h - 1] += ways[h];
    }
    ways = std::move(next);
  }
  return ways[0];
}

BigInt tree_first_returns(int d, int k) {
  if (k < 1) throw InvalidInput("first-return length index must be >= 1");
  // (1/k) binom(2(k-1), k-1) d (d-1)^(k-1)
  BigInt binom = 1;
  for (int i = 1; i <= k - 1; ++i) binom = binom * (k - 1 + i) / i;
  BigInt pw = 1;
  for (int i = 0; i < k - 1; ++i) pw *= (d - 1);
  return binom * d * pw / k;
}

std::int64_t tree_sphere_size(int d, int k) {
  if (k == 0) return 1;
  std::int64_t s = d;
  for (int i = 1; i < k; ++i) s *= (d - 1);
  return s;
}

std::int64_t tree_ball_size(int d, int k) {
  std::int64_t s = 0;
  for (int i = 0; i <= k; ++i) s += tree_sphere_size(d, i);
  return s;
}

std::vector<NbPath> enumerate_nb_paths(const RegularGraph& g, int x, int k) {
  std::vector<NbPath> out{NbPath{x, {}}};
  for (int step = 0; step < k; ++step) {
    std::vector<NbPath> next;
    next.reserve(out.size() * static_cast<size_t>(g.degree()));
    for (const auto& p : out) {
      const int v = p.head(g);
      for (int id : g.out_edges(v)) {
        if (!p.edges.empty() && id == g.reversal(p.edges.back())) continue;
        NbPath q = p;
        q.edges.push_back(id);
        next.push_back(std::move(q));
      }
    }
    out = std::move(next);
  }
  return out;
}

std::vector<Walk> enumerate_closed_walks(const RegularGraph& g, int x, int k, double budget) {
  if (std::pow(static_cast<double>(g.degree()), k) > budget)
    throw BudgetExceeded("closed-walk enumeration d^k = " + std::to_string(g.degree()) + "^" +
                         std::to_string(k) + " exceeds budget");
  std::vector<Walk> out;
  Walk cur;
  cur.reserve(static_cast<size_t>(k));
  auto dfs = [&](auto&& self, int v) -> void {
    if (static_cast<int>(cur.size()) == k) {
      if (v == x) out.push_back(cur);
      return;
    }
    for (int id : g.out_edges(v)) {
      cur.push_back(id);
      self(self, g.edge(id).head);
      cur.pop_back();
    }
  };
  dfs(dfs, x);
  return out;
}

std::vector<int> reduce_word(const RegularGraph& g, std::span<const int> edges) {
  std::vector<int> stack;
  for (int id : edges) {
    if (!stack.empty() && g.reversal(stack.back()) == id)
      stack.pop_back();
    else
      stack.push_back(id);
  }
  return stack;
}

std::vector<int> SpanningTree::edges() const {
  std::vector<int> out;
  for (int v : order)
    if (parent_edge[static_cast<size_t>(v)] >= 0) out.push_back(parent_edge[static_cast<size_t>(v)]);
  return out;
}

SpanningTree spanning_tree(const RegularGraph& g, int root) {
  const int n = g.vertex_count();
  if (root < 0 || root >= n) throw InvalidInput("spanning tree root out of range");
  SpanningTree t;
  t.root = root;
  t.parent_edge.assign(static_cast<size_t>(n), -1);
  std::vector<char> seen(static_cast<size_t>(n), 0);
  seen[static_cast<size_t>(root)] = 1;
  std::deque<int> queue{root};
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    t.order.push_back(u);
    for (int id : g.out_edges(u)) {
      const int w = g.edge(id).head;
      if (seen[static_cast<size_t>(w)]) continue;
      seen[static_cast<size_t>(w)] = 1;
      t.parent_edge[static_cast<size_t>(w)] = id;
      queue.push_back(w);
    }
  }
  return t;
}

}  // namespace gvb

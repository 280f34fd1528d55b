#include "gvb/bundle.hpp"

#include <random>
#include <string>

namespace gvb {

namespace {

void check_transport(const CMat& m, int l, int id) {
  if (m.rows() != l || m.cols() != l)
    throw InvalidInput("transport on edge " + std::to_string(id) + " has shape " + std::to_string(m.rows()) +
                       "x" + std::to_string(m.cols()) + ", expected " + std::to_string(l) + "x" +
                       std::to_string(l));
  const double def = unitarity_defect(m);
  if (!(def <= kUnitaryTol))
    throw InvalidInput("transport on edge " + std::to_string(id) + " is not unitary (defect " +
                       std::to_string(def) + ")");
}

}  // namespace

FlatBundle make_bundle(const RegularGraph& g, const std::map<int, CMat>& transports) {
  if (transports.empty()) throw InvalidInput("no transports given");
  const int l = static_cast<int>(transports.begin()->second.rows());
  if (l < 1) throw InvalidInput("fiber dimension must be positive");
  std::vector<CMat> full(static_cast<size_t>(g.oriented_edge_count()));
  std::vector<char> set(full.size(), 0);
  for (const auto& [id, m] : transports) {
    if (id < 0 || id >= g.oriented_edge_count()) throw InvalidInput("transport for unknown edge " + std::to_string(id));
    check_transport(m, l, id);
    full[static_cast<size_t>(id)] = m;
    set[static_cast<size_t>(id)] = 1;
  }
  for (int id = 0; id < g.oriented_edge_count(); ++id) {
    const int r = g.reversal(id);
    if (set[static_cast<size_t>(id)]) continue;
    if (!set[static_cast<size_t>(r)])
      throw InvalidInput("no transport for edge " + std::to_string(id) + " or its reversal " + std::to_string(r));
    full[static_cast<size_t>(id)] = full[static_cast<size_t>(r)].adjoint();
  }
  return make_bundle(g, std::move(full));
}

FlatBundle make_bundle(const RegularGraph& g, std::vector<CMat> transports) {
  if (static_cast<int>(transports.size()) != g.oriented_edge_count())
    throw InvalidInput("expected " + std::to_string(g.oriented_edge_count()) + " transports, got " +
                       std::to_string(transports.size()));
  const int l = static_cast<int>(transports.front().rows());
  if (l < 1) throw InvalidInput("fiber dimension must be positive");
  for (int id = 0; id < g.oriented_edge_count(); ++id) check_transport(transports[static_cast<size_t>(id)], l, id);
  for (int id = 0; id < g.oriented_edge_count(); ++id) {
    const int r = g.reversal(id);
    const double def = (transports[static_cast<size_t>(id)] * transports[static_cast<size_t>(r)] -
                        CMat::Identity(l, l)).norm();
    if (!(def <= kUnitaryTol))
      throw InvalidInput("transport on edge " + std::to_string(id) + " is not the inverse of its reversal " +
                         std::to_string(r) + " (defect " + std::to_string(def) + ")");
  }
  return FlatBundle{g, l, std::move(transports)};
}

FlatBundle trivial_bundle(const RegularGraph& g, int fiber_dim) {
  if (fiber_dim < 1) throw InvalidInput("fiber dimension must be positive");
  return FlatBundle{g, fiber_dim,
                    std::vector<CMat>(static_cast<size_t>(g.oriented_edge_count()),
                                      CMat::Identity(fiber_dim, fiber_dim))};
}

FlatBundle random_bundle(const RegularGraph& g, int fiber_dim, std::uint64_t seed) {
  if (fiber_dim < 1) throw InvalidInput("fiber dimension must be positive");
  std::mt19937_64 rng(seed);
  std::map<int, CMat> t;
  for (const auto& e : g.edges())
    if (e.id < e.reversal) t[e.id] = haar_unitary(fiber_dim, rng);
  return make_bundle(g, t);
}

CMat laplacian_matrix(const FlatBundle& F) {
  const int l = F.fiber_dim;
  CMat L = CMat::Zero(F.dim(), F.dim());
  for (const auto& e : F.graph.edges()) L.block(e.head * l, e.tail * l, l, l) += F.phi(e.id);
  return L;
}

CVec apply_laplacian(const FlatBundle& F, const CVec& u) {
  const int l = F.fiber_dim;
  CVec out = CVec::Zero(F.dim());
  for (const auto& e : F.graph.edges()) out.segment(e.head * l, l) += F.phi(e.id) * u.segment(e.tail * l, l);
  return out;
}

CMat path_transport(const FlatBundle& F, std::span<const int> edges) {
  CMat h = CMat::Identity(F.fiber_dim, F.fiber_dim);
  for (int id : edges) h = F.phi(id) * h;
  return h;
}

CMat holonomy(const FlatBundle& F, int x, std::span<const int> walk) {
  int v = x;
  for (int id : walk) {
    if (F.graph.edge(id).tail != v)
      throw InvalidInput("walk is not connected at edge " + std::to_string(id));
    v = F.graph.edge(id).head;
  }
  if (v != x) throw InvalidInput("walk is not closed");
  return path_transport(F, walk);
}

double trace_power_oracle(const FlatBundle& F, int k, double budget) {
  double total = 0;
  for (int x = 0; x < F.graph.vertex_count(); ++x)
    for (const auto& w : enumerate_closed_walks(F.graph, x, k, budget)) total += holonomy(F, x, w).trace().real();
  return total;
}

double trace_power_dense(const FlatBundle& F, int k) {
  const CMat L = laplacian_matrix(F);
  CMat P = CMat::Identity(F.dim(), F.dim());
  for (int i = 0; i < k; ++i) P = P * L;
  return P.trace().real();
}

FlatBundle apply_gauge(const FlatBundle& F, const GaugeTransform& gauge) {
  if (static_cast<int>(gauge.psi.size()) != F.graph.vertex_count())
    throw InvalidInput("gauge has wrong number of vertices");
  for (size_t v = 0; v < gauge.psi.size(); ++v) check_transport(gauge.psi[v], F.fiber_dim, static_cast<int>(v));
  std::vector<CMat> t(F.transport.size());
  for (const auto& e : F.graph.edges())
    t[static_cast<size_t>(e.id)] =
        gauge.psi[static_cast<size_t>(e.head)] * F.phi(e.id) * gauge.psi[static_cast<size_t>(e.tail)].adjoint();
  return FlatBundle{F.graph, F.fiber_dim, std::move(t)};
}

std::pair<FlatBundle, GaugeTransform> gauge_trivialize(const FlatBundle& F, const SpanningTree& tree) {
  const int n = F.graph.vertex_count();
  if (static_cast<int>(tree.parent_edge.size()) != n || static_cast<int>(tree.order.size()) != n)
    throw InvalidInput("spanning tree does not cover the graph");
  GaugeTransform gauge;
  gauge.psi.assign(static_cast<size_t>(n), CMat());
  std::vector<char> done(static_cast<size_t>(n), 0);
  for (int v : tree.order) {
    const int pe = tree.parent_edge[static_cast<size_t>(v)];
    if (pe < 0) {
      if (v != tree.root) throw InvalidInput("vertex " + std::to_string(v) + " has no parent edge");
      gauge.psi[static_cast<size_t>(v)] = CMat::Identity(F.fiber_dim, F.fiber_dim);
    } else {
      const auto& e = F.graph.edge(pe);
      if (e.head != v || !done[static_cast<size_t>(e.tail)])
        throw InvalidInput("tree edge " + std::to_string(pe) + " is inconsistent with the visiting order");
      // ψ_v φ(e) ψ_parent* = I
      gauge.psi[static_cast<size_t>(v)] = gauge.psi[static_cast<size_t>(e.tail)] * F.phi(pe).adjoint();
    }
    done[static_cast<size_t>(v)] = 1;
  }
  return {apply_gauge(F, gauge), std::move(gauge)};
}

CMat conjugation_matrix(const CMat& phi) {
  const auto l = phi.rows();
  CMat out(l * l, l * l);
  const CMat c = phi.conjugate();
  for (Eigen::Index a = 0; a < l; ++a)
    for (Eigen::Index b = 0; b < l; ++b) out.block(a * l, b * l, l, l) = c(a, b) * phi;
  return out;
}

FlatBundle endomorphism_bundle(const FlatBundle& F) {
  std::vector<CMat> t;
  t.reserve(F.transport.size());
  for (const auto& m : F.transport) t.push_back(conjugation_matrix(m));
  return FlatBundle{F.graph, F.fiber_dim * F.fiber_dim, std::move(t)};
}

}  // namespace gvb

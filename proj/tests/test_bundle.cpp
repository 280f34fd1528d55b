#include <cmath>
#include <map>

#include "doctest.h"
#include "gvb/bundle.hpp"
#include "gvb/lps.hpp"
#include "gvb/spectral.hpp"

using namespace gvb;

namespace {

RVec sorted(RVec v) {
  std::sort(v.data(), v.data() + v.size());
  return v;
}

CMat phase(double theta) { return CMat::Constant(1, 1, std::polar(1.0, theta)); }

}  // namespace

TEST_CASE("trivial line bundle Laplacian is the adjacency matrix") {
  const RegularGraph g = petersen_graph();
  const CMat L = laplacian_matrix(trivial_bundle(g, 1));
  RMat A = RMat::Zero(10, 10);
  for (const auto& e : g.edges()) A(e.head, e.tail) += 1;
  CHECK((L - A.cast<cplx>()).norm() == doctest::Approx(0));
}

TEST_CASE("4-cycle spectra") {
  const RegularGraph c = cycle_graph(4);
  const RVec ev = eigenvalues(laplacian_matrix(trivial_bundle(c, 1)));
  CHECK(ev[0] == doctest::Approx(-2));
  CHECK(ev[1] == doctest::Approx(0).epsilon(1e-12));
  CHECK(ev[2] == doctest::Approx(0).epsilon(1e-12));
  CHECK(ev[3] == doctest::Approx(2));
  // one edge with phase -1 shifts to 2cos((2k+1)π/4)
  std::map<int, CMat> tr;
  for (const auto& e : c.edges())
    if (e.id < e.reversal) tr.emplace(e.id, phase(tr.empty() ? kPi : 0.0));
  const RVec tw = eigenvalues(laplacian_matrix(make_bundle(c, tr)));
  for (double x : tw) CHECK(std::abs(x) == doctest::Approx(std::sqrt(2.0)));
  const CMat L = laplacian_matrix(random_bundle(c, 2, 3));
  CHECK(L.rows() == 8);
  CHECK(hermiticity_defect(L) < 1e-14);
}

TEST_CASE("bouquet bundles average over the group elements") {
  const RegularGraph b = bouquet_graph(1);
  const FlatBundle one = trivial_bundle(b, 1);
  CHECK(laplacian_matrix(one)(0, 0).real() == doctest::Approx(2));
  std::mt19937_64 rng(4);
  const CMat2 g1 = random_su2(rng), g2 = random_su2(rng);
  const RegularGraph b2 = bouquet_graph(2);
  const int p = 3;
  std::map<int, CMat> tr;
  int loop = 0;
  for (const auto& e : b2.edges())
    if (e.id < e.reversal) tr.emplace(e.id, sym_rep(loop++ == 0 ? g1 : g2, p));
  const CMat L = laplacian_matrix(make_bundle(b2, tr));
  const CMat expect = sym_rep(g1, p) + sym_rep(g1, p).adjoint() + sym_rep(g2, p) + sym_rep(g2, p).adjoint();
  CHECK((L - expect).norm() < 1e-12);
}

TEST_CASE("make_bundle validation") {
  const RegularGraph c = cycle_graph(3);
  std::map<int, CMat> bad;
  bad.emplace(0, CMat::Constant(1, 1, cplx(2.0)));
  CHECK_THROWS_AS(make_bundle(c, bad), InvalidInput);
  std::map<int, CMat> wrong_dim;
  wrong_dim.emplace(0, CMat::Identity(2, 2));
  wrong_dim.emplace(2, CMat::Identity(1, 1));
  CHECK_THROWS_AS(make_bundle(c, wrong_dim), InvalidInput);
  std::vector<CMat> all(6, phase(0.3));  // reversal carries the same phase, not its inverse
  CHECK_THROWS_AS(make_bundle(c, all), InvalidInput);
}

TEST_CASE("random bundles are seeded and unitary") {
  const FlatBundle a = random_bundle(petersen_graph(), 3, 17), b = random_bundle(petersen_graph(), 3, 17);
  const FlatBundle c = random_bundle(petersen_graph(), 3, 18);
  double diff = 0, other = 0;
  for (int e = 0; e < 30; ++e) {
    diff = std::max(diff, (a.phi(e) - b.phi(e)).norm());
    other = std::max(other, (a.phi(e) - c.phi(e)).norm());
    CHECK(unitarity_defect(a.phi(e)) < 1e-12);
    CHECK((a.phi(a.graph.reversal(e)) - a.phi(e).adjoint()).norm() < 1e-15);
  }
  CHECK(diff == 0.0);
  CHECK(other > 0.1);
  const FlatBundle line = random_bundle(cycle_graph(5), 1, 2);
  for (int e = 0; e < 10; ++e) CHECK(std::abs(line.phi(e)(0, 0)) == doctest::Approx(1.0));
}

TEST_CASE("Haar moment E|tr U|^2 = 1 (Monte Carlo, loose)") {
  std::mt19937_64 rng(2024);
  double acc = 0;
  const int n = 2000;
  for (int i = 0; i < n; ++i) acc += std::norm(haar_unitary(3, rng).trace());
  CHECK(acc / n == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("holonomy and trace formula") {
  const FlatBundle F = random_bundle(petersen_graph(), 2, 5);
  const int e = F.graph.out_edges(0)[1];
  const std::vector<int> back = {e, F.graph.reversal(e)};
  CHECK((holonomy(F, 0, back) - CMat::Identity(2, 2)).norm() < 1e-14);
  const std::vector<int> open = {e};
  CHECK_THROWS_AS(holonomy(F, 0, open), InvalidInput);
  CHECK(trace_power_oracle(F, 0) == doctest::Approx(20));
  CHECK(trace_power_oracle(trivial_bundle(petersen_graph(), 1), 2) == doctest::Approx(30));
  for (int k = 1; k <= 6; ++k) {
    const double a = trace_power_dense(F, k);
    CHECK(std::abs(a - trace_power_oracle(F, k)) <= 1e-8 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("gauge transforms") {
  const FlatBundle F = random_bundle(petersen_graph(), 2, 9);
  const SpanningTree t = spanning_tree(F.graph);
  const auto [G, psi] = gauge_trivialize(F, t);
  for (int e : t.edges()) CHECK((G.phi(e) - CMat::Identity(2, 2)).norm() < 1e-12);
  CHECK((sorted(eigenvalues(laplacian_matrix(G))) - sorted(eigenvalues(laplacian_matrix(F)))).norm() < 1e-10);
  // holonomy traces are gauge invariant
  for (const auto& w : enumerate_closed_walks(F.graph, 3, 5))
    CHECK(std::abs(holonomy(F, 3, w).trace() - holonomy(G, 3, w).trace()) < 1e-12);
  const FlatBundle same = apply_gauge(F, GaugeTransform{std::vector<CMat>(10, CMat::Identity(2, 2))});
  for (int e = 0; e < 30; ++e) CHECK((same.phi(e) - F.phi(e)).norm() == 0.0);

  // 4-cycle with phases i on one orientation of each edge: the non-tree edge
  // carries the whole cycle holonomy
  const RegularGraph c = cycle_graph(4);
  std::map<int, CMat> tr;
  for (const auto& e : c.edges())
    if (e.id < e.reversal) tr.emplace(e.id, phase(kPi / 2));
  const FlatBundle P = make_bundle(c, tr);
  const SpanningTree ct = spanning_tree(c);
  const auto [Q, g] = gauge_trivialize(P, ct);
  std::vector<int> cycle;
  int x = 0, prev = -1;
  for (int s = 0; s < 4; ++s) {
    int next = -1;
    for (int e : c.out_edges(x))
      if (e != prev) next = e;
    cycle.push_back(next);
    prev = c.reversal(next);
    x = c.edge(next).head;
  }
  CHECK(std::abs(holonomy(P, 0, cycle)(0, 0) - holonomy(Q, 0, cycle)(0, 0)) < 1e-14);
}

TEST_CASE("endomorphism bundle") {
  const FlatBundle line = random_bundle(petersen_graph(), 1, 11);
  const FlatBundle E1 = endomorphism_bundle(line);
  for (int e = 0; e < 30; ++e) CHECK(std::abs(E1.phi(e)(0, 0) - 1.0) < 1e-14);
  const FlatBundle E2 = endomorphism_bundle(trivial_bundle(petersen_graph(), 2));
  CHECK((E2.phi(0) - CMat::Identity(4, 4)).norm() == 0.0);
  const FlatBundle F = random_bundle(petersen_graph(), 2, 12);
  const FlatBundle E = endomorphism_bundle(F);
  CHECK(E.fiber_dim == 4);
  // vec(φ A φ*) = conj(φ) ⊗ φ vec(A)
  CMat A = CMat::Random(2, 2);
  const CMat B = F.phi(3) * A * F.phi(3).adjoint();
  const CVec va = Eigen::Map<const CVec>(A.data(), 4), vb = Eigen::Map<const CVec>(B.data(), 4);
  CHECK((conjugation_matrix(F.phi(3)) * va - vb).norm() < 1e-14);
  const RVec ev = eigenvalues(laplacian_matrix(E));
  CHECK(ev.maxCoeff() == doctest::Approx(3.0));
}

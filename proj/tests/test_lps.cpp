#include <cmath>
#include <set>

#include "doctest.h"
#include "gvb/cp1.hpp"
#include "gvb/lps.hpp"
#include "gvb/spectral.hpp"

using namespace gvb;

TEST_CASE("number theory helpers") {
  CHECK(is_prime(13));
  CHECK_FALSE(is_prime(15));
  CHECK_FALSE(is_prime(1));
  CHECK(pow_mod(3, 4, 7) == 4);
  CHECK((inv_mod(11, 13) * 11) % 13 == 1);
  CHECK(sqrt_minus_one(5) == 2);
  CHECK(sqrt_minus_one(13) == 5);
  CHECK(sqrt_minus_one(17) == 4);
  CHECK_THROWS_AS(sqrt_minus_one(7), InvalidInput);
  CHECK(legendre(13, 5) == -1);
  CHECK(legendre(5, 13) == -1);
  CHECK(legendre(13, 17) == 1);
}

TEST_CASE("quaternion generators") {
  const auto g5 = quaternion_generators(5);
  CHECK(g5.size() == 6);
  std::set<std::array<int, 4>> want = {{1, 2, 0, 0}, {1, -2, 0, 0}, {1, 0, 2, 0},
                                       {1, 0, -2, 0}, {1, 0, 0, 2}, {1, 0, 0, -2}};
  std::set<std::array<int, 4>> got;
  for (const auto& a : g5) got.insert({a.a0, a.a1, a.a2, a.a3});
  CHECK(got == want);
  const auto g13 = quaternion_generators(13);
  CHECK(g13.size() == 14);
  int ones = 0, threes = 0;
  for (const auto& a : g13) {
    CHECK(a.norm() == 13);
    CHECK(a.a0 > 0);
    CHECK(a.a0 % 2 == 1);
    if (a.a0 == 1) ++ones;
    if (a.a0 == 3) ++threes;
  }
  CHECK(ones == 8);
  CHECK(threes == 6);
  CHECK(std::is_sorted(g13.begin(), g13.end()));
  const auto conj = conjugate_index(g13);
  for (size_t i = 0; i < g13.size(); ++i) {
    CHECK(g13[static_cast<size_t>(conj[i])] == g13[i].conj());
    CHECK(conj[static_cast<size_t>(conj[i])] == static_cast<int>(i));
  }
  CHECK_THROWS_AS(quaternion_generators(7), InvalidInput);
  CHECK_THROWS_AS(quaternion_generators(9), InvalidInput);
}

TEST_CASE("projective matrices") {
  const QuaternionGen a{1, 2, 0, 0};
  const PGL2Element m = projective_matrix(a, 13, 5);
  // [[11, 0], [0, 4]] up to scalars: first entry normalized to 1
  const std::int64_t s = inv_mod(11, 13);
  CHECK(m == PGL2Element::canonical(1, 0, 0, (4 * s) % 13, 13));
  for (const auto& g : quaternion_generators(13)) {
    const PGL2Element x = projective_matrix(g, 5);
    const PGL2Element y = projective_matrix(g.conj(), 5);
    CHECK(x * y == PGL2Element::identity(5));
  }
  // determinant is the quaternion norm mod p1 up to squares of the scalar
  const PGL2Element raw = projective_matrix(QuaternionGen{3, 2, 0, 0}, 5, 2);
  CHECK(legendre(static_cast<int>(raw.det()), 5) == legendre(13, 5));
}

TEST_CASE("su2_of") {
  const CMat2 g = su2_of(QuaternionGen{1, 2, 0, 0}, 5);
  CHECK(std::abs(g(0, 0) - cplx(1, 2) / std::sqrt(5.0)) < 1e-15);
  CHECK(std::abs(g(0, 1)) < 1e-15);
  CHECK(std::abs(g(1, 1) - cplx(1, -2) / std::sqrt(5.0)) < 1e-15);
  for (const auto& a : quaternion_generators(13)) {
    const CMat2 u = su2_of(a, 13);
    CHECK(std::abs(u.determinant() - 1.0) < 1e-14);
    CHECK((su2_of(a.conj(), 13) * u - CMat2::Identity()).norm() < 1e-14);
  }
}

TEST_CASE("Cayley graphs") {
  const CayleyGraph a = cayley_graph(13, 5);
  CHECK(a.graph.vertex_count() == 120);
  CHECK(a.graph.degree() == 14);
  CHECK(a.pgl);
  CHECK(a.b == 2);
  CHECK(expected_cayley_order(13, 5) == 120);
  CHECK(expected_cayley_order(5, 13) == 2184);
  CHECK(expected_cayley_order(13, 17) == 2448);
  const CayleyGraph c = cayley_graph(13, 17);
  CHECK(c.graph.vertex_count() == 2448);
  CHECK_FALSE(c.pgl);
  // edge x*d + j goes from x to a_j x
  for (int x = 0; x < 120; x += 17)
    for (int j = 0; j < 14; ++j) {
      const auto& e = a.graph.edge(x * 14 + j);
      CHECK(e.tail == x);
      CHECK(a.labels[static_cast<size_t>(e.head)] ==
            projective_matrix(a.generators[static_cast<size_t>(j)], 5, a.b) * a.labels[static_cast<size_t>(x)]);
    }
  CHECK_THROWS_AS(cayley_graph(13, 13), InvalidInput);
}

TEST_CASE("Cayley bundles") {
  const CayleyGraph cg = cayley_graph(13, 5);
  const FlatBundle b0 = cayley_bundle(cg, 0);
  CHECK(b0.fiber_dim == 1);
  RMat A = RMat::Zero(120, 120);
  for (const auto& e : cg.graph.edges()) A(e.head, e.tail) += 1;
  CHECK((laplacian_matrix(b0) - A.cast<cplx>()).norm() < 1e-12);
  const FlatBundle b1 = cayley_bundle(cg, 1);
  CHECK(laplacian_matrix(b1).rows() == 240);
  CHECK(b1.dim() == 240);
  // bipartite p = 0 spectrum is symmetric
  const RVec ev = eigenvalues(laplacian_matrix(b0));
  for (Eigen::Index i = 0; i < ev.size(); ++i) CHECK(std::abs(ev[i] + ev[ev.size() - 1 - i]) < 1e-8);
}

TEST_CASE("symmetric power representation") {
  const double th = 0.7;
  CMat2 g = CMat2::Zero();
  g(0, 0) = std::polar(1.0, th);
  g(1, 1) = std::polar(1.0, -th);
  const CMat r = sym_rep(g, 1);
  CHECK(r.rows() == 2);
  CHECK(std::abs(r.trace() - 2 * std::cos(th)) < 1e-14);
  CHECK((r - r.diagonal().asDiagonal().toDenseMatrix()).norm() < 1e-14);
  CHECK(std::abs(r(1, 1) - std::polar(1.0, -th)) < 1e-14);  // s_{1,1} ∝ z0
  std::mt19937_64 rng(1);
  const CMat2 h = random_su2(rng), k = random_su2(rng);
  CHECK(std::abs(sym_rep(h, 0)(0, 0) - 1.0) < 1e-15);
  for (int p : {1, 2, 5, 12}) {
    CHECK((sym_rep(h * k, p) - sym_rep(h, p) * sym_rep(k, p)).norm() < 1e-12);
    CHECK(unitarity_defect(sym_rep(h, p)) < 1e-12);
  }
  // p = 1 is similar to g itself
  const RVec e1 = eigenvalues(CMat((sym_rep(h, 1) + sym_rep(h, 1).adjoint()) / 2.0));
  const RVec e2 = eigenvalues(CMat((h + h.adjoint()) / 2.0));
  CHECK((e1 - e2).norm() < 1e-14);
  // (g s)(z) = s(g⁻¹ z) on a section evaluated at a point
  const int p = 4;
  FockSection s{p, CVec::Random(p + 1)};
  const C2 z = C2(cplx(0.3, 0.1), cplx(-0.5, 0.7)).normalized();
  const FockSection gs{p, sym_rep(h, p) * s.coeffs};
  CHECK(std::abs(section_eval(gs, z) - section_eval(s, h.adjoint() * z)) < 1e-12);
}

TEST_CASE("SU(2) characters") {
  CMat2 g = CMat2::Zero();
  g(0, 0) = cplx(0, 1);
  g(1, 1) = cplx(0, -1);
  CHECK(su2_character(g, 2) == doctest::Approx(-1));
  CHECK(su2_character(CMat2::Identity(), 7) == doctest::Approx(8));
  std::mt19937_64 rng(50);
  for (int n = 0; n < 10; ++n) {
    const CMat2 h = random_su2(rng);
    const double th = std::acos(std::clamp(h.trace().real() / 2, -1.0, 1.0));
    CHECK(std::abs(sym_rep(h, 50).trace() - std::sin(51 * th) / std::sin(th)) < 1e-10);
    CHECK(std::abs(su2_character(h, 50) - std::sin(51 * th) / std::sin(th)) < 1e-10);
  }
}

TEST_CASE("rotation of the sphere") {
  std::mt19937_64 rng(3);
  const CMat2 g = random_su2(rng), h = random_su2(rng);
  const Eigen::Matrix3d R = so3_of(g);
  CHECK((R.transpose() * R - Eigen::Matrix3d::Identity()).norm() < 1e-14);
  CHECK(R.determinant() == doctest::Approx(1.0));
  CHECK((so3_of(g * h) - R * so3_of(h)).norm() < 1e-14);
  const C2 z = C2(cplx(0.2, -0.4), cplx(0.9, 0.1)).normalized();
  CHECK((sphere_coords(g * z) - R * sphere_coords(z)).norm() < 1e-14);
}

TEST_CASE("zero-one law") {
  CMat2 g = CMat2::Zero();
  g(0, 0) = cplx(0, 1);
  g(1, 1) = cplx(0, -1);
  const ZeroOneReport r = zero_one_check(g, {1, 2, 3, 10, 40});
  CHECK(r.rows[0].ratio == doctest::Approx(0).epsilon(1e-15));
  CHECK(r.within_bound);
  CHECK_THROWS_AS(zero_one_check(CMat2(-CMat2::Identity()), {3}), InvalidInput);
  // the central law itself: χ_p(-I)/(p+1) = (-1)^p
  CHECK(su2_character(CMat2(-CMat2::Identity()), 3) / 4 == doctest::Approx(-1));
}

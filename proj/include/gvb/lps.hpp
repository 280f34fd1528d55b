#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "gvb/bundle.hpp"
#include "gvb/graph.hpp"
#include "gvb/types.hpp"

namespace gvb {

bool is_prime(std::int64_t n);
std::int64_t pow_mod(std::int64_t base, std::int64_t exp, std::int64_t mod);
std::int64_t inv_mod(std::int64_t a, std::int64_t mod);

/// a0 + a1 i + a2 j + a3 k with a0 > 0 odd, a1..a3 even and norm p0.
struct QuaternionGen {
  int a0 = 0, a1 = 0, a2 = 0, a3 = 0;

  QuaternionGen conj() const { return {a0, -a1, -a2, -a3}; }
  long norm() const { return long(a0) * a0 + long(a1) * a1 + long(a2) * a2 + long(a3) * a3; }
  auto operator<=>(const QuaternionGen&) const = default;
};

/// All p0+1 generators, sorted lexicographically.
std::vector<QuaternionGen> quaternion_generators(int p0);
/// Index of the conjugate of each generator in the same list.
std::vector<int> conjugate_index(const std::vector<QuaternionGen>& gens);

/// Smallest b in (0, p1) with b^2 ≡ -1 mod p1.
int sqrt_minus_one(int p1);
/// Legendre symbol via Euler's criterion.
int legendre(int a, int p);

/// 2×2 matrix over ℤ/pℤ up to scalars; stored in canonical form
/// (first nonzero entry in row-major order equal to 1).
struct PGL2Element {
  std::array<std::int64_t, 4> m{1, 0, 0, 1};  ///< row-major a, b, c, d
  std::int64_t p = 2;

  static PGL2Element canonical(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d, std::int64_t p);
  static PGL2Element identity(std::int64_t p) { return canonical(1, 0, 0, 1, p); }
  PGL2Element operator*(const PGL2Element& o) const;
  std::int64_t det() const;
  std::int64_t key() const { return ((m[0] * p + m[1]) * p + m[2]) * p + m[3]; }
  bool operator==(const PGL2Element& o) const { return m == o.m && p == o.p; }
};

PGL2Element projective_matrix(const QuaternionGen& a, int p1, int b);
PGL2Element projective_matrix(const QuaternionGen& a, int p1);

/// (1/√p0)[[a0 + i a1, a2 + i a3], [-a2 + i a3, a0 - i a1]].
CMat2 su2_of(const QuaternionGen& a, int p0);
template <typename Rng>
CMat2 random_su2(Rng& rng);
/// Rotation R(g) with n(gz) = R(g) n(z) for n = (n1, n2, n3).
Eigen::Matrix3d so3_of(const CMat2& g);

struct CayleyGraph {
  int p0 = 0, p1 = 0, b = 0;
  bool pgl = true;        ///< PGL2 when legendre(p0, p1) = -1, else PSL2
  bool bipartite = true;  ///< same condition as pgl
  std::vector<QuaternionGen> generators;
  std::vector<int> conjugate;        ///< generator index of the conjugate
  std::vector<PGL2Element> labels;   ///< vertex -> group element
  RegularGraph graph;                ///< edge x*d + j : x -> a_j x
  int generator_of_edge(int id) const { return id % (p0 + 1); }
};

/// Expected vertex count: p1(p1^2-1) for PGL2, half that for PSL2.
std::int64_t expected_cayley_order(int p0, int p1);
CayleyGraph cayley_graph(int p0, int p1);
/// Fiber Sym^p(ℂ²); edge x -> a x carries sym_rep(su2_of(a), p).
FlatBundle cayley_bundle(const CayleyGraph& cg, int p);
FlatBundle cayley_bundle(int p0, int p1, int p);

/// Action of g on Sym^p(ℂ²), (g s)(z) = s(g⁻¹ z), in the basis
/// s_{p,i} = √((p+1) C(p,i)) z0^i z1^{p-i}, i = 0..p.
CMat sym_rep(const CMat2& g, int p);
/// sin((p+1)θ)/sin θ with 2 cos θ = tr g.
double su2_character(const CMat2& g, int p);

struct ZeroOneRow {
  int p = 0;
  double ratio = 0;  ///< χ_p(g)/(p+1)
  double bound = 0;  ///< 1/((p+1)|sin θ|)
};
struct ZeroOneReport {
  double theta = 0;
  std::vector<ZeroOneRow> rows;
  bool within_bound = true;
};
ZeroOneReport zero_one_check(const CMat2& g, const std::vector<int>& ps, double tol = 1e-9);

// ---------------------------------------------------------------------------

template <typename Rng>
CMat2 random_su2(Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Vector4d q;
  for (int i = 0; i < 4; ++i) q[i] = gauss(rng);
  q.normalize();
  CMat2 g;
  g << cplx(q[0], q[1]), cplx(q[2], q[3]), cplx(-q[2], q[3]), cplx(q[0], -q[1]);
  return g;
}

}  // namespace gvb

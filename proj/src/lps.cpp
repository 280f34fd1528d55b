#include "gvb/lps.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>
#include <unordered_map>

namespace gvb {

bool is_prime(std::int64_t n) {
  if (n < 2) return false;
  for (std::int64_t q = 2; q * q <= n; ++q)
    if (n % q == 0) return false;
  return true;
}

std::int64_t pow_mod(std::int64_t base, std::int64_t exp, std::int64_t mod) {
  std::int64_t r = 1 % mod;
  base = ((base % mod) + mod) % mod;
  while (exp > 0) {
    if (exp & 1) r = r * base % mod;
    base = base * base % mod;
    exp >>= 1;
  }
  return r;
}

std::int64_t inv_mod(std::int64_t a, std::int64_t mod) {
  a = ((a % mod) + mod) % mod;
  if (a == 0) throw InvalidInput("zero has no inverse mod " + std::to_string(mod));
  return pow_mod(a, mod - 2, mod);
}

namespace {

void require_prime_1mod4(int p, const char* name) {
  if (!is_prime(p)) throw InvalidInput(std::string(name) + " = " + std::to_string(p) + " is not prime");
  if (p % 4 != 1) throw InvalidInput(std::string(name) + " = " + std::to_string(p) + " is not 1 mod 4");
}

}  // namespace

std::vector<QuaternionGen> quaternion_generators(int p0) {
  require_prime_1mod4(p0, "p0");
  std::vector<QuaternionGen> out;
  const int r = static_cast<int>(std::sqrt(static_cast<double>(p0))) + 1;
  for (int a0 = 1; a0 <= r; a0 += 2)
    for (int a1 = -r - (r % 2); a1 <= r; a1 += 2)
      for (int a2 = -r - (r % 2); a2 <= r; a2 += 2)
        for (int a3 = -r - (r % 2); a3 <= r; a3 += 2) {
          QuaternionGen q{a0, a1, a2, a3};
          if (q.norm() == p0) out.push_back(q);
        }
  std::sort(out.begin(), out.end());
  if (static_cast<int>(out.size()) != p0 + 1)
    throw NumericalError("found " + std::to_string(out.size()) + " generators for p0 = " + std::to_string(p0));
  return out;
}

std::vector<int> conjugate_index(const std::vector<QuaternionGen>& gens) {
  std::vector<int> out;
  for (const auto& g : gens) {
    const auto it = std::find(gens.begin(), gens.end(), g.conj());
    if (it == gens.end()) throw InvalidInput("generator set is not closed under conjugation");
    out.push_back(static_cast<int>(it - gens.begin()));
  }
  return out;
}

int sqrt_minus_one(int p1) {
  require_prime_1mod4(p1, "p1");
  for (std::int64_t b = 1; b < p1; ++b)
    if ((b * b + 1) % p1 == 0) return static_cast<int>(b);
  throw InvalidInput("no square root of -1 mod " + std::to_string(p1));
}

int legendre(int a, int p) {
  if (!is_prime(p) || p == 2) throw InvalidInput("legendre needs an odd prime modulus, got " + std::to_string(p));
  if (a % p == 0) throw InvalidInput("legendre symbol of a multiple of p");
  return pow_mod(a, (p - 1) / 2, p) == 1 ? 1 : -1;
}

PGL2Element PGL2Element::canonical(std::int64_t a, std::int64_t b, std::int64_t c, std::int64_t d, std::int64_t p) {
  std::array<std::int64_t, 4> m{a, b, c, d};
  for (auto& x : m) x = ((x % p) + p) % p;
  if ((m[0] * m[3] - m[1] * m[2]) % p == 0) throw InvalidInput("singular matrix mod " + std::to_string(p));
  const auto first = *std::find_if(m.begin(), m.end(), [](std::int64_t x) { return x != 0; });
  const std::int64_t s = inv_mod(first, p);
  for (auto& x : m) x = x * s % p;
  PGL2Element e;
  e.m = m;
  e.p = p;
  return e;
}

PGL2Element PGL2Element::operator*(const PGL2Element& o) const {
  return canonical(m[0] * o.m[0] + m[1] * o.m[2], m[0] * o.m[1] + m[1] * o.m[3], m[2] * o.m[0] + m[3] * o.m[2],
                   m[2] * o.m[1] + m[3] * o.m[3], p);
}

std::int64_t PGL2Element::det() const { return (((m[0] * m[3] - m[1] * m[2]) % p) + p) % p; }

PGL2Element projective_matrix(const QuaternionGen& a, int p1, int b) {
  if (a.norm() % p1 == 0) throw InvalidInput("p1 divides the quaternion norm");
  const std::int64_t B = b;
  return PGL2Element::canonical(a.a0 + B * a.a1, a.a2 + B * a.a3, -a.a2 + B * a.a3, a.a0 - B * a.a1, p1);
}

PGL2Element projective_matrix(const QuaternionGen& a, int p1) { return projective_matrix(a, p1, sqrt_minus_one(p1)); }

CMat2 su2_of(const QuaternionGen& a, int p0) {
  const double s = 1.0 / std::sqrt(static_cast<double>(p0));
  CMat2 g;
  g << cplx(a.a0, a.a1), cplx(a.a2, a.a3), cplx(-a.a2, a.a3), cplx(a.a0, -a.a1);
  return s * g;
}

Eigen::Matrix3d so3_of(const CMat2& g) {
  std::array<CMat2, 3> S;
  S[0] << 0, 1, 1, 0;
  S[1] << 0, cplx(0, 1), cplx(0, -1), 0;  // -σ_y
  S[2] << 1, 0, 0, -1;
  Eigen::Matrix3d R;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) R(i, j) = 0.5 * (S[j] * g.adjoint() * S[i] * g).trace().real();
  return R;
}

std::int64_t expected_cayley_order(int p0, int p1) {
  const std::int64_t q = p1;
  const std::int64_t pgl = q * (q * q - 1);
  return legendre(p0, p1) == -1 ? pgl : pgl / 2;
}

CayleyGraph cayley_graph(int p0, int p1) {
  if (p0 == p1) throw InvalidInput("p0 and p1 must be distinct primes");
  CayleyGraph cg;
  cg.p0 = p0;
  cg.p1 = p1;
  cg.generators = quaternion_generators(p0);
  cg.conjugate = conjugate_index(cg.generators);
  cg.b = sqrt_minus_one(p1);
  cg.pgl = cg.bipartite = legendre(p0, p1) == -1;
  const int d = p0 + 1;

  std::vector<PGL2Element> gen_mod;
  for (const auto& a : cg.generators) gen_mod.push_back(projective_matrix(a, p1, cg.b));

  std::unordered_map<std::int64_t, int> seen;
  std::vector<PGL2Element> elems{PGL2Element::identity(p1)};
  seen[elems[0].key()] = 0;
  for (size_t i = 0; i < elems.size(); ++i)
    for (const auto& a : gen_mod) {
      const PGL2Element y = a * elems[i];
      if (seen.emplace(y.key(), 0).second) elems.push_back(y);
    }
  const std::int64_t expected = expected_cayley_order(p0, p1);
  if (static_cast<std::int64_t>(elems.size()) != expected)
    throw NumericalError("Cayley graph over p1 = " + std::to_string(p1) + " reached " +
                         std::to_string(elems.size()) + " elements, expected " + std::to_string(expected));
  std::sort(elems.begin(), elems.end(), [](const auto& x, const auto& y) { return x.key() < y.key(); });
  for (size_t i = 0; i < elems.size(); ++i) seen[elems[i].key()] = static_cast<int>(i);

  std::vector<OrientedEdge> edges;
  edges.reserve(elems.size() * static_cast<size_t>(d));
  for (size_t x = 0; x < elems.size(); ++x)
    for (int j = 0; j < d; ++j) {
      const int y = seen.at((gen_mod[static_cast<size_t>(j)] * elems[x]).key());
      const int id = static_cast<int>(x) * d + j;
      edges.push_back({y, static_cast<int>(x), id, y * d + cg.conjugate[static_cast<size_t>(j)]});
    }
  cg.labels = std::move(elems);
  cg.graph = build_graph(d, std::move(edges));
  return cg;
}

FlatBundle cayley_bundle(const CayleyGraph& cg, int p) {
  if (p < 0) throw InvalidInput("representation degree must be non-negative");
  std::vector<CMat> per_gen;
  for (const auto& a : cg.generators) per_gen.push_back(sym_rep(su2_of(a, cg.p0), p));
  std::map<int, CMat> t;
  for (const auto& e : cg.graph.edges())
    if (e.id < e.reversal) t[e.id] = per_gen[static_cast<size_t>(cg.generator_of_edge(e.id))];
  return make_bundle(cg.graph, t);
}

FlatBundle cayley_bundle(int p0, int p1, int p) { return cayley_bundle(cayley_graph(p0, p1), p); }

CMat sym_rep(const CMat2& g, int p) {
  if (p < 0) throw InvalidInput("representation degree must be non-negative");
  using ld = long double;
  using lc = std::complex<ld>;
  const CMat2 hinv = g.adjoint();
  const lc h00(hinv(0, 0).real(), hinv(0, 0).imag()), h01(hinv(0, 1).real(), hinv(0, 1).imag());
  const lc h10(hinv(1, 0).real(), hinv(1, 0).imag()), h11(hinv(1, 1).real(), hinv(1, 1).imag());

  std::vector<std::vector<ld>> binom(static_cast<size_t>(p) + 1);
  for (int n = 0; n <= p; ++n) {
    binom[static_cast<size_t>(n)].assign(static_cast<size_t>(n) + 1, 1.0L);
    for (int k = 1; k < n; ++k)
      binom[static_cast<size_t>(n)][static_cast<size_t>(k)] =
          binom[static_cast<size_t>(n) - 1][static_cast<size_t>(k) - 1] + binom[static_cast<size_t>(n) - 1][static_cast<size_t>(k)];
  }
  auto powers = [p](lc z) {
    std::vector<lc> out(static_cast<size_t>(p) + 1, lc(1));
    for (int k = 1; k <= p; ++k) out[static_cast<size_t>(k)] = out[static_cast<size_t>(k) - 1] * z;
    return out;
  };
  const auto P00 = powers(h00), P01 = powers(h01), P10 = powers(h10), P11 = powers(h11);
  const auto& Cp = binom[static_cast<size_t>(p)];

  CMat M(p + 1, p + 1);
  std::vector<lc> A, B;
  for (int j = 0; j <= p; ++j) {
    // (h00 z0 + h01 z1)^j (h10 z0 + h11 z1)^(p-j), indexed by z0-degree
    A.assign(static_cast<size_t>(j) + 1, lc(0));
    B.assign(static_cast<size_t>(p - j) + 1, lc(0));
    for (int a = 0; a <= j; ++a)
      A[static_cast<size_t>(a)] = binom[static_cast<size_t>(j)][static_cast<size_t>(a)] * P00[static_cast<size_t>(a)] * P01[static_cast<size_t>(j - a)];
    for (int b = 0; b <= p - j; ++b)
      B[static_cast<size_t>(b)] = binom[static_cast<size_t>(p - j)][static_cast<size_t>(b)] * P10[static_cast<size_t>(b)] *
                                  P11[static_cast<size_t>(p - j - b)];
    for (int i = 0; i <= p; ++i) {
      lc c(0);
      for (int a = std::max(0, i - (p - j)); a <= std::min(i, j); ++a) c += A[static_cast<size_t>(a)] * B[static_cast<size_t>(i - a)];
      c *= std::sqrt(Cp[static_cast<size_t>(j)] / Cp[static_cast<size_t>(i)]);
      M(i, j) = cplx(static_cast<double>(c.real()), static_cast<double>(c.imag()));
    }
  }
  return M;
}

double su2_character(const CMat2& g, int p) {
  const double c = std::clamp(0.5 * g.trace().real(), -1.0, 1.0);
  const double theta = std::acos(c);
  const double s = std::sin(theta);
  if (std::abs(s) < 1e-7) {
    double sum = 0;
    for (int k = 0; k <= p; ++k) sum += std::cos((p - 2 * k) * theta);
    return sum;
  }
  return std::sin((p + 1) * theta) / s;
}

ZeroOneReport zero_one_check(const CMat2& g, const std::vector<int>& ps, double tol) {
  const double tr = g.trace().real();
  if (std::abs(tr) >= 2 - 1e-9) throw InvalidInput("zero_one_check needs a non-central element");
  ZeroOneReport rep;
  rep.theta = std::acos(0.5 * tr);
  for (int p : ps) {
    ZeroOneRow row;
    row.p = p;
    row.ratio = su2_character(g, p) / (p + 1);
    row.bound = 1.0 / ((p + 1) * std::abs(std::sin(rep.theta)));
    rep.within_bound = rep.within_bound && std::abs(row.ratio) <= row.bound + tol;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace gvb

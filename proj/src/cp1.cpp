#include "gvb/cp1.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <boost/math/special_functions/legendre.hpp>

namespace gvb {

// ---------------------------------------------------------------------------
// points, distances, kernels

CP1Point CP1Point::canonical(cplx z0, cplx z1) {
  const double n = std::sqrt(std::norm(z0) + std::norm(z1));
  if (!(n > 0)) throw InvalidInput("zero vector is not a point of CP1");
  z0 /= n;
  z1 /= n;
  const cplx lead = std::abs(z0) > 0 ? z0 : z1;
  const cplx ph = std::conj(lead) / std::abs(lead);
  return {z0 * ph, z1 * ph};
}

CP1Point CP1Point::from_angles(double theta, double phi) {
  return canonical(std::cos(theta / 2), std::sin(theta / 2) * std::polar(1.0, phi));
}

double CP1Point::theta() const { return 2 * std::atan2(std::abs(z1), std::abs(z0)); }

double CP1Point::phi() const {
  if (std::abs(z1) == 0 || std::abs(z0) == 0) return 0;
  return std::remainder(std::arg(z1) - std::arg(z0), 2 * kPi);
}

Eigen::Vector3d CP1Point::sphere() const { return sphere_coords(vec()); }

Eigen::Vector3d sphere_coords(const C2& z) {
  const cplx w = z[0] * std::conj(z[1]);
  return {2 * w.real(), 2 * w.imag(), std::norm(z[0]) - std::norm(z[1])};
}

double fs_distance(const C2& z, const C2& w) {
  const double c = std::abs(w.dot(z)) / (z.norm() * w.norm());
  return std::acos(std::min(1.0, c));
}

cplx bergman(int p, const C2& z, const C2& w) {
  if (p < 0) throw InvalidInput("negative degree");
  return static_cast<double>(p + 1) * std::pow(z[0] * std::conj(w[0]) + z[1] * std::conj(w[1]), p);
}

// ---------------------------------------------------------------------------
// exact integrals

namespace {

long double binom_ld(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long double c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// a! b! / (a+b+1)!
long double beta_ld(int a, int b) { return 1.0L / ((a + b + 1) * binom_ld(a + b, a)); }

}  // namespace

BigRational monomial_integral_exact(int a0, int a1, int b0, int b1) {
  if (a0 < 0 || a1 < 0 || b0 < 0 || b1 < 0) throw InvalidInput("negative exponent");
  if (a0 != b0 || a1 != b1) return BigRational(0);
  boost::multiprecision::cpp_int num = 1, den = 1;
  for (int i = 2; i <= a0; ++i) num *= i;
  for (int i = 2; i <= a1; ++i) num *= i;
  for (int i = 2; i <= a0 + a1 + 1; ++i) den *= i;
  return BigRational(num, den);
}

double monomial_integral(int a0, int a1, int b0, int b1) {
  if (a0 < 0 || a1 < 0 || b0 < 0 || b1 < 0) throw InvalidInput("negative exponent");
  if (a0 != b0 || a1 != b1) return 0;
  return static_cast<double>(beta_ld(a0, a1));
}

double sym_basis_norm(int p, int i) { return static_cast<double>(std::sqrt((p + 1) * binom_ld(p, i))); }

// ---------------------------------------------------------------------------
// polynomials on the sphere

SpherePoly SpherePoly::constant(double c) {
  SpherePoly f;
  f.add({0, 0, 0}, c);
  return f;
}

SpherePoly SpherePoly::coordinate(int i) {
  if (i < 0 || i > 2) throw InvalidInput("sphere coordinate index out of range");
  SpherePoly f;
  Exponent e{0, 0, 0};
  e[static_cast<size_t>(i)] = 1;
  f.add(e, 1.0);
  return f;
}

void SpherePoly::add(const Exponent& e, double c) {
  if (c == 0) return;
  auto [it, fresh] = terms_.emplace(e, c);
  if (!fresh) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

int SpherePoly::degree() const {
  int d = 0;
  for (const auto& [e, c] : terms_) d = std::max(d, e[0] + e[1] + e[2]);
  return d;
}

double SpherePoly::operator()(const Eigen::Vector3d& n) const {
  double v = 0;
  for (const auto& [e, c] : terms_) v += c * std::pow(n[0], e[0]) * std::pow(n[1], e[1]) * std::pow(n[2], e[2]);
  return v;
}

SpherePoly SpherePoly::operator+(const SpherePoly& o) const {
  SpherePoly r = *this;
  for (const auto& [e, c] : o.terms_) r.add(e, c);
  return r;
}

SpherePoly SpherePoly::operator-(const SpherePoly& o) const { return *this + o * -1.0; }

SpherePoly SpherePoly::operator*(const SpherePoly& o) const {
  SpherePoly r;
  for (const auto& [e, c] : terms_)
    for (const auto& [f, d] : o.terms_) r.add({e[0] + f[0], e[1] + f[1], e[2] + f[2]}, c * d);
  return r;
}

SpherePoly SpherePoly::operator*(double s) const {
  SpherePoly r;
  for (const auto& [e, c] : terms_) r.add(e, c * s);
  return r;
}

SpherePoly SpherePoly::pow(int k) const {
  if (k < 0) throw InvalidInput("negative power");
  SpherePoly r = constant(1.0);
  for (int i = 0; i < k; ++i) r = r * *this;
  return r;
}

SpherePoly SpherePoly::compose_linear(const Eigen::Matrix3d& A) const {
  std::array<SpherePoly, 3> lin;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) lin[static_cast<size_t>(i)] = lin[static_cast<size_t>(i)] + coordinate(j) * A(i, j);
  SpherePoly r;
  for (const auto& [e, c] : terms_) r = r + lin[0].pow(e[0]) * lin[1].pow(e[1]) * lin[2].pow(e[2]) * c;
  return r;
}

std::string SpherePoly::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [e, c] : terms_) {
    if (!first) os << (c < 0 ? " - " : " + ");
    else if (c < 0) os << "-";
    first = false;
    os << std::abs(c);
    for (int i = 0; i < 3; ++i)
      if (e[static_cast<size_t>(i)] > 0) {
        os << "*n" << i + 1;
        if (e[static_cast<size_t>(i)] > 1) os << "^" << e[static_cast<size_t>(i)];
      }
  }
  return os.str();
}

namespace {

class PolyParser {
 public:
  explicit PolyParser(const std::string& s) : s_(s) {}

  SpherePoly parse() {
    SpherePoly f = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw InvalidInput("observable \"" + s_ + "\": " + msg + " at position " + std::to_string(pos_));
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  SpherePoly expr() {
    SpherePoly f = term();
    for (;;) {
      if (eat('+')) f = f + term();
      else if (eat('-')) f = f - term();
      else return f;
    }
  }

  SpherePoly term() {
    SpherePoly f = power();
    for (;;) {
      if (eat('*')) {
        f = f * power();
      } else if (eat('/')) {
        const SpherePoly g = power();
        if (g.degree() != 0 || g.is_zero()) fail("division by a non-constant or zero");
        f = f * (1.0 / g.terms().begin()->second);
      } else {
        return f;
      }
    }
  }

  SpherePoly power() {
    SpherePoly f = atom();
    if (eat('^')) {
      skip();
      size_t used = 0;
      int k = 0;
      try {
        k = std::stoi(s_.substr(pos_), &used);
      } catch (const std::exception&) {
        fail("expected an integer exponent");
      }
      if (k < 0) fail("negative exponent");
      pos_ += used;
      f = f.pow(k);
    }
    return f;
  }

  SpherePoly atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (eat('(')) {
      SpherePoly f = expr();
      if (!eat(')')) fail("missing ')'");
      return f;
    }
    if (eat('-')) return power() * -1.0;
    if (eat('+')) return power();
    if (s_[pos_] == 'n' && pos_ + 1 < s_.size() && s_[pos_ + 1] >= '1' && s_[pos_ + 1] <= '3') {
      const int i = s_[pos_ + 1] - '1';
      pos_ += 2;
      return SpherePoly::coordinate(i);
    }
    if (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.') {
      size_t used = 0;
      const double v = std::stod(s_.substr(pos_), &used);
      pos_ += used;
      return SpherePoly::constant(v);
    }
    fail("unexpected '" + std::string(1, s_[pos_]) + "'");
  }

  const std::string& s_;
  size_t pos_ = 0;
};

}  // namespace

SpherePoly SpherePoly::parse(const std::string& text) { return PolyParser(text).parse(); }

SphereFunction SphereFunction::from_callable(std::function<double(const Eigen::Vector3d&)> f, int band) {
  if (band < 0) throw InvalidInput("band must be non-negative");
  SphereFunction s;
  s.callable = std::move(f);
  s.band = band;
  return s;
}

namespace {

using ZPoly = std::map<std::array<int, 4>, cplx>;

ZPoly zmul(const ZPoly& a, const ZPoly& b) {
  ZPoly r;
  for (const auto& [e, c] : a)
    for (const auto& [f, d] : b) r[{e[0] + f[0], e[1] + f[1], e[2] + f[2], e[3] + f[3]}] += c * d;
  return r;
}

ZPoly zpow(const ZPoly& a, int k) {
  ZPoly r{{{0, 0, 0, 0}, cplx(1)}};
  for (int i = 0; i < k; ++i) r = zmul(r, a);
  return r;
}

}  // namespace

std::map<std::array<int, 4>, cplx> z_expansion(const SpherePoly& f) {
  const cplx I(0, 1);
  // n1 = z0 z̄1 + z̄0 z1, n2 = -i z0 z̄1 + i z̄0 z1, n3 = z0 z̄0 - z1 z̄1
  const ZPoly n1{{{1, 0, 0, 1}, 1.0}, {{0, 1, 1, 0}, 1.0}};
  const ZPoly n2{{{1, 0, 0, 1}, -I}, {{0, 1, 1, 0}, I}};
  const ZPoly n3{{{1, 0, 1, 0}, 1.0}, {{0, 1, 0, 1}, -1.0}};
  ZPoly r;
  for (const auto& [e, c] : f.terms())
    for (const auto& [m, v] : zmul(zmul(zpow(n1, e[0]), zpow(n2, e[1])), zpow(n3, e[2]))) r[m] += c * v;
  return r;
}

double sphere_integral(const SpherePoly& f) {
  long double s = 0;
  for (const auto& [m, c] : z_expansion(f))
    if (m[0] == m[2] && m[1] == m[3]) s += static_cast<long double>(c.real()) * beta_ld(m[0], m[1]);
  return static_cast<double>(s);
}

std::vector<QuadratureNode> quadrature_grid(int band) {
  if (band < 0) throw InvalidInput("band must be non-negative");
  const int nx = band + 1, nphi = 2 * band + 1;
  std::vector<double> xs, ws;
  for (double x : boost::math::legendre_p_zeros<double>(nx)) {
    const double dp = boost::math::legendre_p_prime(nx, x);
    const double w = 2.0 / ((1 - x * x) * dp * dp);
    xs.push_back(x);
    ws.push_back(w);
    if (x != 0) {
      xs.push_back(-x);
      ws.push_back(w);
    }
  }
  std::vector<QuadratureNode> nodes;
  for (size_t a = 0; a < xs.size(); ++a) {
    const double th = std::acos(xs[a]);
    for (int b = 0; b < nphi; ++b) {
      const double ph = 2 * kPi * b / nphi;
      QuadratureNode q;
      q.z = C2(std::cos(th / 2), std::sin(th / 2) * std::polar(1.0, ph));
      q.n = sphere_coords(q.z);
      q.weight = ws[a] / 2 / nphi;
      nodes.push_back(q);
    }
  }
  return nodes;
}

namespace {

// s_{p,i}(z) for all i
CVec basis_values(int p, const C2& z) {
  CVec v(p + 1);
  for (int i = 0; i <= p; ++i) v[i] = sym_basis_norm(p, i) * std::pow(z[0], i) * std::pow(z[1], p - i);
  return v;
}

CMat toeplitz_quadrature(const SphereFunction& f, int p, int band) {
  CMat T = CMat::Zero(p + 1, p + 1);
  for (const auto& q : quadrature_grid(band)) {
    const CVec s = basis_values(p, q.z);
    T.noalias() += (q.weight * f(q.n)) * s.conjugate() * s.transpose();
  }
  return T;
}

}  // namespace

CMat toeplitz(const SphereFunction& f, int p) {
  if (p < 0) throw InvalidInput("negative degree");
  if (!f.is_polynomial()) return toeplitz_quadrature(f, p, p + f.band);
  CMat T = CMat::Zero(p + 1, p + 1);
  for (const auto& [m, c] : z_expansion(f.poly)) {
    const int a0 = m[0], a1 = m[1], b0 = m[2], b1 = m[3];
    for (int j = 0; j <= p; ++j) {
      const int i = a0 + j - b0;
      if (i < 0 || i > p || a1 + p - j != b1 + p - i) continue;
      const long double norm =
          (p + 1) * std::sqrt(binom_ld(p, i) * binom_ld(p, j)) * beta_ld(a0 + j, a1 + p - j);
      T(i, j) += c * static_cast<double>(norm);
    }
  }
  return T;
}

CMat gram_quadrature(int p, int band) {
  return toeplitz_quadrature(SphereFunction::from_callable([](const Eigen::Vector3d&) { return 1.0; }, 0), p, band);
}

CMat gram_exact(int p) {
  CMat G(p + 1, p + 1);
  for (int i = 0; i <= p; ++i)
    for (int j = 0; j <= p; ++j)
      G(i, j) = sym_basis_norm(p, i) * sym_basis_norm(p, j) * monomial_integral(j, p - j, i, p - i);
  return G;
}

ToeplitzNormReport toeplitz_norm_check(const SphereFunction& f, int p, double tol) {
  ToeplitzNormReport r;
  const CMat T = toeplitz(f, p);
  Eigen::SelfAdjointEigenSolver<CMat> es(0.5 * (T + T.adjoint()), Eigen::EigenvaluesOnly);
  r.op_norm = es.eigenvalues().cwiseAbs().maxCoeff();
  for (const auto& q : quadrature_grid(std::max(64, 4 * std::max(p, f.degree()))))
    r.grid_max = std::max(r.grid_max, std::abs(f(q.n)));
  r.hs_normalized = T.squaredNorm() / (p + 1);
  if (f.is_polynomial()) {
    r.l2_sq = sphere_integral(f.poly * f.poly);
  } else {
    for (const auto& q : quadrature_grid(2 * f.band + 2)) r.l2_sq += q.weight * std::pow(f(q.n), 2);
  }
  r.norm_ok = r.op_norm <= r.grid_max + tol;
  r.hs_ok = r.hs_normalized <= r.l2_sq + tol;
  return r;
}

// ---------------------------------------------------------------------------
// sections and zeros

cplx section_eval(const FockSection& s, const C2& z) {
  if (s.coeffs.size() != s.p + 1) throw InvalidInput("section has wrong coefficient count");
  return (basis_values(s.p, z).array() * s.coeffs.array()).sum();
}

double pointwise_mass(const FockSection& s, const C2& z) { return std::norm(section_eval(s, z)); }

namespace {

cplx horner(const std::vector<cplx>& c, cplx t) {
  cplx v = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) v = v * t + *it;
  return v;
}

cplx horner_prime(const std::vector<cplx>& c, cplx t) {
  cplx v = 0;
  for (size_t i = c.size() - 1; i >= 1; --i) v = v * t + static_cast<double>(i) * c[i];
  return v;
}

}  // namespace

std::vector<Root> roots(const FockSection& s, bool polish, double merge_tol) {
  const int p = s.p;
  if (s.coeffs.size() != p + 1) throw InvalidInput("section has wrong coefficient count");
  std::vector<cplx> a(static_cast<size_t>(p) + 1);
  double anorm = 0;
  for (int i = 0; i <= p; ++i) {
    a[static_cast<size_t>(i)] = s.coeffs[i] * sym_basis_norm(p, i);
    anorm += std::norm(a[static_cast<size_t>(i)]);
  }
  anorm = std::sqrt(anorm);
  if (!(anorm > 0)) throw InvalidInput("zero section has no well-defined zeros");

  // chart z1 = 1: Σ a_i t^i, t = z0/z1; chart z0 = 1: Σ a_{p-j} u^j, u = z1/z0
  const bool chart1 = std::abs(a[static_cast<size_t>(p)]) >= std::abs(a[0]);
  std::vector<cplx> c(a);
  if (!chart1) std::reverse(c.begin(), c.end());
  auto point = [chart1](cplx t) { return chart1 ? CP1Point::canonical(t, 1.0) : CP1Point::canonical(1.0, t); };
  const CP1Point at_infinity = chart1 ? CP1Point::canonical(1.0, 0.0) : CP1Point::canonical(0.0, 1.0);

  const double cutoff = 1e-12 * anorm;
  int hi = p, lo = 0;
  while (hi >= 0 && std::abs(c[static_cast<size_t>(hi)]) <= cutoff) --hi;
  while (lo < hi && std::abs(c[static_cast<size_t>(lo)]) <= cutoff) ++lo;

  std::vector<Root> raw;
  if (p - hi > 0) raw.push_back({at_infinity, p - hi});
  if (lo > 0) raw.push_back({point(0.0), lo});
  const int m = hi - lo;
  if (m > 0) {
    std::vector<cplx> q(c.begin() + lo, c.begin() + hi + 1);  // degree m, q[m] ≠ 0
    CMat comp = CMat::Zero(m, m);
    for (int i = 1; i < m; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < m; ++i) comp(i, m - 1) = -q[static_cast<size_t>(i)] / q[static_cast<size_t>(m)];
    Eigen::ComplexEigenSolver<CMat> ces(comp, false);
    if (ces.info() != Eigen::Success) throw NumericalError("companion eigensolve failed");
    for (Eigen::Index i = 0; i < m; ++i) {
      cplx t = ces.eigenvalues()[i];
      if (polish) {
        for (int it = 0; it < 3; ++it) {
          const cplx f = horner(q, t), df = horner_prime(q, t);
          if (std::abs(df) == 0) break;
          const cplx tn = t - f / df;
          if (std::abs(horner(q, tn)) < std::abs(f)) t = tn;
          else break;
        }
      }
      raw.push_back({point(t), 1});
    }
  }

  std::vector<Root> out;
  for (const auto& r : raw) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const Root& o) { return fs_distance(o.point.vec(), r.point.vec()) <= merge_tol; });
    if (it == out.end()) out.push_back(r);
    else it->multiplicity += r.multiplicity;
  }
  return out;
}

}  // namespace gvb

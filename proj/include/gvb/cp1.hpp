#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "gvb/types.hpp"

namespace gvb {

using C2 = Eigen::Vector2cd;
using BigRational = boost::multiprecision::cpp_rational;

/// Point of ℂP¹ on its unit representative; the first nonzero coordinate is
/// real positive.
struct CP1Point {
  cplx z0{1.0}, z1{0.0};

  static CP1Point canonical(cplx z0, cplx z1);
  static CP1Point from_angles(double theta, double phi);
  C2 vec() const { return C2(z0, z1); }
  double theta() const;  ///< 2 atan2(|z1|, |z0|)
  double phi() const;    ///< arg z1 - arg z0
  Eigen::Vector3d sphere() const;
};

/// arccos |⟨z, w⟩|.
double fs_distance(const C2& z, const C2& w);
/// (p+1) ⟨z, w⟩^p on the given representatives.
cplx bergman(int p, const C2& z, const C2& w);
/// (n1, n2, n3) = (2 Re z0 z̄1, 2 Im z0 z̄1, |z0|² - |z1|²).
Eigen::Vector3d sphere_coords(const C2& z);

/// ∫ z0^a0 z1^a1 z̄0^b0 z̄1^b1 dv, Vol(ℂP¹) = 1.
BigRational monomial_integral_exact(int a0, int a1, int b0, int b1);
double monomial_integral(int a0, int a1, int b0, int b1);

/// √((p+1) C(p,i)).
double sym_basis_norm(int p, int i);

/// Real polynomial in n1, n2, n3.
class SpherePoly {
 public:
  using Exponent = std::array<int, 3>;

  SpherePoly() = default;
  static SpherePoly constant(double c);
  static SpherePoly coordinate(int i);  ///< n_{i+1}
  /// Grammar: sums and products of numbers, n1, n2, n3, powers `^k`, parentheses,
  /// division by constants.
  static SpherePoly parse(const std::string& text);

  const std::map<Exponent, double>& terms() const { return terms_; }
  int degree() const;
  bool is_zero() const { return terms_.empty(); }
  double operator()(const Eigen::Vector3d& n) const;

  SpherePoly operator+(const SpherePoly& o) const;
  SpherePoly operator-(const SpherePoly& o) const;
  SpherePoly operator*(const SpherePoly& o) const;
  SpherePoly operator*(double s) const;
  SpherePoly pow(int k) const;
  /// n ↦ f(A n).
  SpherePoly compose_linear(const Eigen::Matrix3d& A) const;
  std::string to_string() const;

 private:
  void add(const Exponent& e, double c);
  std::map<Exponent, double> terms_;
};

/// Observable on ℂP¹: a polynomial, or a callable with a declared band limit.
struct SphereFunction {
  SpherePoly poly;
  std::function<double(const Eigen::Vector3d&)> callable;
  int band = 0;  ///< degree in n for callables

  SphereFunction() = default;
  SphereFunction(SpherePoly p) : poly(std::move(p)) {}  // NOLINT(google-explicit-constructor)
  static SphereFunction from_callable(std::function<double(const Eigen::Vector3d&)> f, int band);

  bool is_polynomial() const { return !callable; }
  int degree() const { return is_polynomial() ? poly.degree() : band; }
  double operator()(const Eigen::Vector3d& n) const { return callable ? callable(n) : poly(n); }
};

/// z-monomial expansion: (a0, a1, b0, b1) -> coefficient of z0^a0 z1^a1 z̄0^b0 z̄1^b1.
std::map<std::array<int, 4>, cplx> z_expansion(const SpherePoly& f);
/// ∫ f dv, exact up to rounding of the coefficients.
double sphere_integral(const SpherePoly& f);

struct QuadratureNode {
  C2 z;
  Eigen::Vector3d n;
  double weight = 0;
};
/// Gauss-Legendre in cos θ (band+1 nodes) × uniform φ (2 band + 1 nodes); exact
/// for z-monomials of bidegree ≤ band.
std::vector<QuadratureNode> quadrature_grid(int band);

/// Entries ⟨T s_{p,j}, s_{p,i}⟩ (exact for polynomials, quadrature otherwise).
CMat toeplitz(const SphereFunction& f, int p);
/// Gram matrix of s_{p,·} by quadrature on grid(band).
CMat gram_quadrature(int p, int band);
/// Gram matrix of s_{p,·} from exact monomial integrals.
CMat gram_exact(int p);

struct ToeplitzNormReport {
  double op_norm = 0;
  double grid_max = 0;
  double hs_normalized = 0;  ///< ‖T‖²_HS/(p+1)
  double l2_sq = 0;          ///< ∫ f²
  bool norm_ok = false;
  bool hs_ok = false;
};
ToeplitzNormReport toeplitz_norm_check(const SphereFunction& f, int p, double tol = 1e-9);

/// Coefficients in the s_{p,i} basis.
struct FockSection {
  int p = 0;
  CVec coeffs;
};
cplx section_eval(const FockSection& s, const C2& z);
double pointwise_mass(const FockSection& s, const C2& z);

struct Root {
  CP1Point point;
  int multiplicity = 1;
};
/// Zeros with multiplicity (total exactly p).
std::vector<Root> roots(const FockSection& s, bool polish = true, double merge_tol = 1e-9);

}  // namespace gvb

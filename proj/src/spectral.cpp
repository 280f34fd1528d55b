#include "gvb/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#ifdef GVB_HAVE_LAPACKE
#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>
#endif

namespace gvb {

namespace {

void check_solution(const CMat& H, Spectrum& S) {
  const Eigen::Index n = S.size();
  if (!S.has_vectors() || n == 0) return;
  const Eigen::Index m = std::min<Eigen::Index>(n, kResidualSamples);
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < m; ++j) cols.push_back(m == n ? j : (j * (n - 1)) / (m - 1));
  CMat V(n, m);
  for (Eigen::Index j = 0; j < m; ++j) V.col(j) = S.vectors.col(cols[static_cast<size_t>(j)]);
  const CMat HV = H * V;
  double res = 0;
  for (Eigen::Index j = 0; j < m; ++j) {
    const double lam = S.values[cols[static_cast<size_t>(j)]];
    res = std::max(res, (HV.col(j) - lam * V.col(j)).norm() / (1 + std::abs(lam)));
  }
  S.residual = res;
  S.orthogonality = (V.adjoint() * V - CMat::Identity(m, m)).norm();
  S.checked_columns = static_cast<int>(m);
  if (!(res <= kResidualTol) || !(S.orthogonality <= kResidualTol))
    throw NumericalError("eigensolver residual " + std::to_string(res) + ", orthogonality defect " +
                         std::to_string(S.orthogonality));
}

}  // namespace

Spectrum eigendecompose(const CMat& H, bool with_vectors) {
  if (H.rows() != H.cols()) throw InvalidInput("eigendecompose needs a square matrix");
  const double scale = std::max(1.0, H.norm());
  if (!(hermiticity_defect(H) <= kHermitianTol * scale))
    throw InvalidInput("matrix is not Hermitian (defect " + std::to_string(hermiticity_defect(H)) + ")");
  Spectrum S;
  const auto n = H.rows();
  if (n == 0) return S;
#ifdef GVB_HAVE_LAPACKE
  CMat A = H;
  RVec w(n);
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, with_vectors ? 'V' : 'N', 'U', static_cast<lapack_int>(n),
                                         A.data(), static_cast<lapack_int>(n), w.data());
  if (info != 0) throw NumericalError("zheevd failed with info " + std::to_string(info));
  S.values = std::move(w);
  if (with_vectors) S.vectors = std::move(A);
#else
  Eigen::SelfAdjointEigenSolver<CMat> es(H, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw NumericalError("eigensolver did not converge");
  S.values = es.eigenvalues();
  if (with_vectors) S.vectors = es.eigenvectors();
#endif
  check_solution(H, S);
  return S;
}

RVec eigenvalues(const CMat& H) { return eigendecompose(H, false).values; }

RadiusReport nontrivial_radius(const RVec& values, int d, double tol) {
  RadiusReport r;
  bool any = false;
  for (double lam : values) {
    if (std::abs(lam - d) <= tol) {
      ++r.excluded_plus;
    } else if (std::abs(lam + d) <= tol) {
      ++r.excluded_minus;
    } else {
      r.radius = std::max(r.radius, std::abs(lam));
      any = true;
    }
  }
  if (!any) throw InvalidInput("every eigenvalue is trivial (±d); nontrivial radius undefined");
  return r;
}

namespace {

double km_radius(int d) { return 2 * std::sqrt(static_cast<double>(d - 1)); }

// μ_KM on λ = R cos t, t ∈ [t_lo, t_hi], with weight λ^k.
double km_integral(int d, double t_lo, double t_hi, int k) {
  if (t_hi <= t_lo) return 0;
  const double R = km_radius(d);
  const double dd = static_cast<double>(d) * d;
  auto g = [&](double t) {
    const double c = std::cos(t), s = std::sin(t);
    return std::pow(R * c, k) * d * R * R * s * s / (2 * kPi * (dd - R * R * c * c));
  };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(g, t_lo, t_hi, 12, 1e-13);
}

// Closed form of km_integral(d, t_lo, t_hi, 0); d² - R² cos² t = (d-2)² + R² sin² t.
double km_angle_mass(int d, double t_lo, double t_hi) {
  if (t_hi <= t_lo) return 0;
  auto F = [d](double t) { return t - (d - 2.0) / d * std::atan2(d * std::sin(t), (d - 2.0) * std::cos(t)); };
  return d / (2 * kPi) * (F(t_hi) - F(t_lo));
}

double to_angle(int d, double x) { return std::acos(std::clamp(x / km_radius(d), -1.0, 1.0)); }

}  // namespace

double km_density(int d, double lambda) {
  if (d < 2) throw InvalidInput("Kesten-McKay needs d >= 2");
  const double r2 = 4.0 * (d - 1);
  if (lambda * lambda >= r2) return 0;
  return d * std::sqrt(r2 - lambda * lambda) / (2 * kPi * (static_cast<double>(d) * d - lambda * lambda));
}

double km_mass(int d, double a, double b) {
  if (d < 2) throw InvalidInput("Kesten-McKay needs d >= 2");
  if (b <= a) return 0;
  return km_angle_mass(d, to_angle(d, b), to_angle(d, a));
}

double km_cdf(int d, double x) { return km_mass(d, -km_radius(d) - 1, x); }

double km_moment(int d, int k) {
  if (d < 2) throw InvalidInput("Kesten-McKay needs d >= 2");
  if (k < 0) throw InvalidInput("moment order must be non-negative");
  if (k % 2 == 1) return 0;
  return km_integral(d, 0, kPi, k);
}

double ks_distance(const RVec& values, int d, double tol) {
  std::vector<double> v;
  for (double lam : values)
    if (std::abs(std::abs(lam) - d) > tol) v.push_back(lam);
  if (v.empty()) throw InvalidInput("no nontrivial eigenvalues for the KS distance");
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  double ks = 0;
  for (size_t i = 0; i < v.size(); ++i) {
    const double G = km_cdf(d, v[i]);
    ks = std::max({ks, std::abs(static_cast<double>(i) / n - G), std::abs(static_cast<double>(i + 1) / n - G)});
  }
  return ks;
}

double logdet(const RVec& values, int d, double tol) {
  if (values.size() == 0) throw InvalidInput("logdet of an empty spectrum");
  double sum = 0;
  int kept = 0;
  for (double lam : values) {
    if (lam > d + tol) throw InvalidInput("eigenvalue " + std::to_string(lam) + " exceeds d");
    if (std::abs(lam - d) <= tol) continue;
    sum += std::log(d - lam);
    ++kept;
  }
  if (kept == 0) throw InvalidInput("logdet: every eigenvalue equals d");
  return sum / static_cast<double>(values.size());
}

double logdet_limit_constant(int d) {
  if (d < 3) throw InvalidInput("logdet constant needs d >= 3");
  const double x = d;
  return (x - 1) * std::log(x - 1) - 0.5 * (x - 2) * std::log(x - 2) - 0.5 * (x - 2) * std::log(x);
}

double quantum_variance(const CMat& M, const Spectrum& S) {
  if (!S.has_vectors()) throw InvalidInput("quantum variance needs eigenvectors");
  if (M.rows() != S.vectors.rows() || M.cols() != S.vectors.rows())
    throw InvalidInput("observable dimension does not match the spectrum");
  const CMat MU = M * S.vectors;
  double total = 0;
  for (Eigen::Index i = 0; i < S.vectors.cols(); ++i) total += std::norm(S.vectors.col(i).dot(MU.col(i)));
  return total / static_cast<double>(S.vectors.cols());
}

double quantum_variance_blockdiag(const std::vector<CMat>& blocks, const Spectrum& S) {
  if (!S.has_vectors()) throw InvalidInput("quantum variance needs eigenvectors");
  Eigen::Index off = 0;
  for (const auto& b : blocks) off += b.rows();
  if (off != S.vectors.rows()) throw InvalidInput("observable dimension does not match the spectrum");
  const Eigen::Index n = S.vectors.cols();
  CVec diag = CVec::Zero(n);
  off = 0;
  for (const auto& b : blocks) {
    const auto Ub = S.vectors.middleRows(off, b.rows());
    const CMat BU = b * Ub;
    diag += (Ub.conjugate().cwiseProduct(BU)).colwise().sum().transpose();
    off += b.rows();
  }
  return diag.cwiseAbs2().sum() / static_cast<double>(n);
}

}  // namespace gvb

#pragma once

#include <vector>

#include "gvb/types.hpp"

namespace gvb {

/// Sorted eigenvalues with (optionally) the unitary eigenvector matrix.
struct Spectrum {
  RVec values;
  CMat vectors;               ///< empty for values-only solves
  double residual = 0;        ///< max ‖Hv - λv‖/(1+|λ|) over checked columns
  double orthogonality = 0;   ///< ‖V_s* V_s - I‖_F over checked columns
  int checked_columns = 0;

  Eigen::Index size() const { return values.size(); }
  bool has_vectors() const { return vectors.size() > 0; }
};

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kResidualTol = 1e-8;
/// Eigenpairs checked for residual/orthogonality; all of them below this size.
inline constexpr int kResidualSamples = 96;

/// Dense Hermitian eigensolve (LAPACK zheevd when available).
Spectrum eigendecompose(const CMat& H, bool with_vectors = true);
RVec eigenvalues(const CMat& H);

struct RadiusReport {
  double radius = 0;
  int excluded_plus = 0;   ///< eigenvalues within tol of +d
  int excluded_minus = 0;  ///< eigenvalues within tol of -d
};
/// max |λ| over eigenvalues with ||λ| - d| > tol.
RadiusReport nontrivial_radius(const RVec& values, int d, double tol = 1e-6);

/// Kesten-McKay density on [-2√(d-1), 2√(d-1)].
double km_density(int d, double lambda);
/// μ_KM([a, b]).
double km_mass(int d, double a, double b);
double km_cdf(int d, double x);
double km_moment(int d, int k);
/// sup |F_emp - F_KM| with eigenvalues within tol of ±d dropped.
double ks_distance(const RVec& values, int d, double tol = 1e-6);

/// (1/n) Σ_{λ ≠ d} ln(d - λ), n = number of eigenvalues.
double logdet(const RVec& values, int d, double tol = 1e-6);
double logdet_limit_constant(int d);

/// (1/n) Σ_i |⟨M u_i, u_i⟩|².
double quantum_variance(const CMat& M, const Spectrum& S);
/// Same for block-diagonal M given by its diagonal blocks in order.
double quantum_variance_blockdiag(const std::vector<CMat>& blocks, const Spectrum& S);

}  // namespace gvb

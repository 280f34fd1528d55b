#pragma once

#include <cstdint>
#include <vector>

#include "gvb/bundle.hpp"
#include "gvb/cp1.hpp"
#include "gvb/lps.hpp"
#include "gvb/spectral.hpp"

namespace gvb {

struct GapRow {
  int index = 0;            ///< family member (representation degree p for Cayley families)
  double top_nontrivial = 0;
  double bottom = 0;
  int plus_d = 0, minus_d = 0;
  bool within_gap = false;  ///< nontrivial spectrum ⊂ [-d, d-ε]
};
struct GapReport {
  double eps = 0;
  int d = 0;
  std::vector<GapRow> rows;
  int total_plus_d = 0;     ///< EXP truncation needs exactly one
  double top_over_family = 0;
  bool exp_truncation = false;
  bool pass = false;
};
GapReport gap_report(const std::vector<FlatBundle>& family, double eps, double tol = 1e-6);
GapReport gap_report(const std::vector<RVec>& spectra, int d, double eps, double tol = 1e-6);

/// Diagonal blocks T_{f_x, p}, one per vertex; fiber dimension must be p+1.
std::vector<CMat> mixed_observable(const FlatBundle& F, const std::vector<SphereFunction>& f_per_vertex);
std::vector<CMat> mixed_observable(const FlatBundle& F, const SphereFunction& f);
CMat block_diagonal(const std::vector<CMat>& blocks);

struct QeRow {
  int p1 = 0, p = 0;
  double variance = 0;
  std::int64_t dim = 0;
  double seconds = 0;
};
inline constexpr std::int64_t kDefaultDenseCap = 6000;
/// Var(T_{f - ⟨f⟩, p}) over Cayley(p0, p1) bundles.
std::vector<QeRow> qe_experiment(int p0, const std::vector<int>& p1s, const std::vector<int>& ps,
                                 const SpherePoly& f, std::int64_t dense_cap = kDefaultDenseCap);

struct ZeroPoint {
  int section = 0, vertex = 0;
  double theta = 0, phi = 0;
  int multiplicity = 0;
};
struct ZeroRow {
  int p = 0;
  int sections = 0;
  int nondegenerate_sections = 0;
  int exact_count_sections = 0;     ///< non-degenerate sections with p|X| zeros
  std::int64_t degenerate_vertices = 0;
  double median_discrepancy = 0;
  double threshold = 0;
  double fraction_below = 0;
  double seconds = 0;
};
struct ZeroExperiment {
  std::vector<ZeroRow> rows;
  std::vector<ZeroPoint> points;  ///< first `emit_sections` sections of each p
};
/// Zeros of eigensections of Cayley(p0, p1) bundles; discrepancy
/// max_g |(1/(p|X|)) Σ g(zeros) - ∫ g| per section. Threshold for p is c/√p.
ZeroExperiment zero_experiment(int p0, int p1, const std::vector<int>& ps, const std::vector<SpherePoly>& tests,
                               double threshold_c = 0.5, int emit_sections = 0,
                               std::int64_t dense_cap = kDefaultDenseCap);

/// Real orthonormal basis of degree-q spherical harmonics as polynomials in n.
std::vector<SpherePoly> harmonic_basis(int q);
/// Matrix of f ↦ f∘R(g)⁻¹ on harmonic_basis(q).
RMat harmonic_rep(const CMat2& g, int q);
/// Bundle over cg.graph with fiber H_q and transport harmonic_rep(generator).
FlatBundle harmonic_bundle(const CayleyGraph& cg, int q);

struct HarmonicReport {
  int q = 0;
  int dim = 0;  ///< 2q+1
  double max_spectral_difference = 0;
  double max_rep_orthogonality_defect = 0;
  bool pass = false;
};
HarmonicReport harmonic_block_check(int p0, int p1, int q, double tol = 1e-8);

struct AlonBoppanaRow {
  int k = 0;
  double good_fraction = 0, bad_fraction = 0;
  double rhs = 0;          ///< certified lower bound on r^{2k}
  double bound = 0;        ///< rhs^{1/(2k)}, 0 when vacuous
  bool vacuous = true;
};
struct AlonBoppanaReport {
  int d = 0;
  std::vector<AlonBoppanaRow> rows;
  double best_bound = 0;
  double ramanujan = 0;  ///< 2√(d-1)
};
AlonBoppanaReport alon_boppana_report(const RegularGraph& g, int k_max);

}  // namespace gvb

#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <utility>
#include <vector>

#include "gvb/graph.hpp"
#include "gvb/types.hpp"

namespace gvb {

inline constexpr double kUnitaryTol = 1e-12;

/// Unitary flat bundle: one ℓ×ℓ unitary per oriented edge, φ(e) : F_tail → F_head,
/// with φ(reversal(e)) = φ(e)*.
struct FlatBundle {
  RegularGraph graph;
  int fiber_dim = 1;
  std::vector<CMat> transport;  ///< indexed by oriented edge id

  const CMat& phi(int edge_id) const { return transport[static_cast<size_t>(edge_id)]; }
  int dim() const { return fiber_dim * graph.vertex_count(); }
};

/// Transports on one orientation per edge (keyed by edge id); reverses are filled
/// with the adjoint. If both orientations are present they must be mutually inverse.
FlatBundle make_bundle(const RegularGraph& g, const std::map<int, CMat>& transports);
/// Transports for every oriented edge; validated.
FlatBundle make_bundle(const RegularGraph& g, std::vector<CMat> transports);

FlatBundle trivial_bundle(const RegularGraph& g, int fiber_dim);
/// Haar unitaries on canonical orientations (id < reversal id).
FlatBundle random_bundle(const RegularGraph& g, int fiber_dim, std::uint64_t seed);

/// Haar-random ℓ×ℓ unitary from QR of a complex Gaussian matrix.
template <typename Rng>
CMat haar_unitary(int n, Rng& rng);

/// Dense ℓ|X|×ℓ|X| twisted Laplacian, vertex-major blocks.
CMat laplacian_matrix(const FlatBundle& F);
/// Δ^F u without forming the matrix.
CVec apply_laplacian(const FlatBundle& F, const CVec& u);

/// Ordered transport product along a closed walk starting at x.
CMat holonomy(const FlatBundle& F, int x, std::span<const int> walk);
/// Transport along an open edge path, φ(e_k)⋯φ(e_1).
CMat path_transport(const FlatBundle& F, std::span<const int> edges);

/// Σ_x Σ_{closed walks γ at x, |γ| = k} tr hol(γ).
double trace_power_oracle(const FlatBundle& F, int k, double budget = kDefaultWalkBudget);
/// Tr[(Δ^F)^k] by dense matrix powers.
double trace_power_dense(const FlatBundle& F, int k);

struct GaugeTransform {
  std::vector<CMat> psi;  ///< per vertex
};

/// φ'(e) = ψ_head φ(e) ψ_tail*.
FlatBundle apply_gauge(const FlatBundle& F, const GaugeTransform& gauge);
/// Gauge in which every tree edge carries the identity.
std::pair<FlatBundle, GaugeTransform> gauge_trivialize(const FlatBundle& F, const SpanningTree& tree);

/// Fiber End(ℂ^ℓ) with column-major vec; transport vec(A) ↦ vec(φ A φ*).
FlatBundle endomorphism_bundle(const FlatBundle& F);
/// conj(φ) ⊗ φ, the matrix of A ↦ φ A φ* on column-major vec(A).
CMat conjugation_matrix(const CMat& phi);

// ---------------------------------------------------------------------------

template <typename Rng>
CMat haar_unitary(int n, Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  CMat z(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) z(i, j) = cplx(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<CMat> qr(z);
  CMat q = qr.householderQ() * CMat::Identity(n, n);
  const CMat r = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const cplx d = r(j, j);
    q.col(j) *= std::abs(d) > 0 ? d / std::abs(d) : cplx(1.0);
  }
  return q;
}

}  // namespace gvb

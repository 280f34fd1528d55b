#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gvb/bundle.hpp"
#include "gvb/spectral.hpp"
#include "gvb/types.hpp"

namespace gvb {

/// All nonbacktracking paths of one length, in canonical index order.
///
/// Index of (e_1, …, e_k): e_1 (d-1)^{k-1} + Σ_{i≥2} digit_i (d-1)^{k-i}, where
/// digit_i is the position of e_i among the d-1 allowed continuations of e_{i-1}.
/// Level 0 paths are vertices.
struct PathLevel {
  int k = 0;
  std::int64_t count = 0;
  std::vector<int> edges;  ///< count × k, row-major
  std::vector<int> tail, head;
  CMat transport;          ///< ℓ × ℓ·count, T(π) = φ(e_k)⋯φ(e_1)

  int edge(std::int64_t i, int j) const { return edges[static_cast<size_t>(i * k + j)]; }
  std::span<const int> path(std::int64_t i) const {
    return {edges.data() + i * k, static_cast<size_t>(k)};
  }
};

inline constexpr int kDefaultLevelCap = 6;
inline constexpr std::int64_t kDefaultPathBudget = 20'000'000;

/// Path-indexed kernel data for one bundle. Levels are built lazily and cached.
class KernelSpace {
 public:
  KernelSpace(FlatBundle F, int level_cap = kDefaultLevelCap, std::int64_t path_budget = kDefaultPathBudget);

  const FlatBundle& bundle() const { return F_; }
  const RegularGraph& graph() const { return F_.graph; }
  int fiber_dim() const { return F_.fiber_dim; }
  int degree() const { return F_.graph.degree(); }
  int vertex_count() const { return F_.graph.vertex_count(); }
  int level_cap() const { return level_cap_; }

  std::int64_t path_count(int k) const;
  const PathLevel& level(int k) const;

  /// Index of the path with these edges (k >= 1).
  std::int64_t index_of(std::span<const int> edges) const;
  /// Position of e among the nonbacktracking continuations of prev.
  int digit(int prev, int e) const;
  std::int64_t prefix_index(int k, std::int64_t i, int m) const;  ///< first m edges (m >= 1)
  std::int64_t drop_first_index(int k, std::int64_t i) const;     ///< edges 2..k (k >= 2)
  std::int64_t append_index(int k, std::int64_t i, int e) const;  ///< π·e
  std::int64_t prepend_index(int k, std::int64_t i, int e) const; ///< e·π

  std::int64_t pow_dm1(int j) const { return pow_[static_cast<size_t>(j)]; }

 private:
  FlatBundle F_;
  int level_cap_;
  std::int64_t budget_;
  std::vector<std::int64_t> pow_;
  mutable std::mutex mu_;
  mutable std::map<int, std::unique_ptr<PathLevel>> levels_;
};

using KernelSpacePtr = std::shared_ptr<const KernelSpace>;
KernelSpacePtr make_kernel_space(const FlatBundle& F, int level_cap = kDefaultLevelCap,
                                 std::int64_t path_budget = kDefaultPathBudget);

/// Level-k kernel operator: Q(π) : F_tail(π) → F_head(π), acting by
/// (Qu)(x) = Σ_{head π = x} Q(π) u(tail π).
struct KernelOperator {
  KernelSpacePtr space;
  int level = 0;
  CMat data;  ///< ℓ × ℓ·count, block i is Q(π_i)

  int l() const { return static_cast<int>(data.rows()); }
  std::int64_t count() const { return data.cols() / data.rows(); }
  auto block(std::int64_t i) { return data.block(0, i * l(), l(), l()); }
  auto block(std::int64_t i) const { return data.block(0, i * l(), l(), l()); }
};

KernelOperator operator+(const KernelOperator& a, const KernelOperator& b);
KernelOperator operator-(const KernelOperator& a, const KernelOperator& b);
KernelOperator operator*(cplx s, const KernelOperator& a);

/// Q = Σ_k Q_(k).
struct LevelDecomposition {
  std::map<int, KernelOperator> parts;
};

KernelOperator zero_kernel(const KernelSpacePtr& space, int k);
/// Independent complex Gaussian entries.
KernelOperator random_kernel(const KernelSpacePtr& space, int k, std::mt19937_64& rng);
KernelOperator identity_kernel(const KernelSpacePtr& space, int k);

/// Ascending coefficients of h_k.
std::vector<double> chebyshev_h(int d, int k);
double chebyshev_h_value(int d, int k, double lambda);
/// Closed form on |λ| < 2√(d-1), used as a cross-check.
double chebyshev_h_trig(int d, int k, double lambda);
CMat chebyshev_h_matrix(const CMat& delta, int d, int k);

CMat to_matrix(const KernelOperator& Q);
CMat to_matrix(const LevelDecomposition& Q);
/// to_matrix(identity_kernel(F, k)) by depth-first accumulation, without
/// materializing the path space.
CMat identity_kernel_matrix(const FlatBundle& F, int k);

KernelOperator cut(const KernelOperator& Q, int k_new);
KernelOperator reverse(const KernelOperator& Q);
KernelOperator truncate(const KernelOperator& Q);
KernelOperator truncate_adj(const KernelOperator& Q);
KernelOperator grad(const KernelOperator& Q);
KernelOperator grad_adj(const KernelOperator& Q);
KernelOperator nb(const KernelOperator& Q);
KernelOperator nb_adj(const KernelOperator& Q);
/// Symbol of [Δ^F, Q]: level k+1 part -∇Q and level k-1 part -∇*Q.
LevelDecomposition commutator(const KernelOperator& Q);

/// (1/(ℓ|X|)) Σ_π tr(R(π)* Q(π)).
cplx inner(const KernelOperator& Q, const KernelOperator& R);
double l2k_norm(const KernelOperator& Q);
double linf_norm(const KernelOperator& Q);
double hs_norm(const KernelOperator& Q);
cplx average(const KernelOperator& Q);

struct HsL2Report {
  int level = 0;
  int min_injectivity = 0;
  bool exact_regime = false;  ///< level <= min inj, equality expected
  double hs2 = 0, l2sq = 0, defect = 0, bound = 0;
  bool pass = false;
};
HsL2Report hs_vs_l2_check(const KernelOperator& Q, double tol = 1e-9);

/// B on level-1 kernel operators of F, size d|X|ℓ², column-major vec per path.
CMat b1_matrix(const FlatBundle& F);

struct B1Report {
  int d = 0;
  std::int64_t dim = 0;
  CVec b1_eigenvalues;
  RVec end_eigenvalues;                 ///< spec Δ^{End(F)}
  std::vector<cplx> predicted;          ///< quadratic roots plus ±1 families
  double max_match_error = 0;           ///< greedy nearest-neighbour matching
  bool spectrum_matches = false;
  double max_pairing_residual = 0;      ///< θ + (d-1)/θ vs spec Δ^End, off ±1, ±(d-1)
  bool pairing_ok = false;
  int mult_plus_one = 0, mult_minus_one = 0;  ///< observed
  int oracle_plus_one = 0, oracle_minus_one = 0;
  int printed_plus_one = 0, printed_minus_one = 0;  ///< (d/2-1)|X|ℓ² + mult(∓d)
  bool sign_assignment_discrepancy = false;
  bool ambiguous_clusters = false;
};
B1Report b1_structure_report(const FlatBundle& F, double tol = 1e-6);

struct KernelCharacterization {
  int max_level = 0;
  int null_dimension = 0;
  int expected_dimension = 0;
  double identity_residual = 0;  ///< distance of each normalized Id_(k) from the nullspace, max
  double smallest_kept_singular = 0;
  bool pass = false;
};
/// Nullspace of Q ↦ ad(Q) on ⊕_{k≤K} levels.
KernelCharacterization kernel_characterization(const FlatBundle& F, int K, double rank_tol = 1e-8);

struct SelftestRow {
  std::string identity;
  int level = 0;
  double residual = 0;  ///< worst relative residual over samples
  double tol = 0;
  bool pass = false;
};
/// Structural identities of the calculus on `samples` seeded random operators per level.
std::vector<SelftestRow> kernel_selftest(const FlatBundle& F, int max_level, int samples, std::uint64_t seed,
                                         double tol = 1e-9);

/// (1/t0) ∫_0^{t0} e^{itH} M e^{-itH} dt in the eigenbasis of S.
CMat time_average(const CMat& M, const Spectrum& S, double t0, double cluster_tol = 1e-10);

}  // namespace gvb

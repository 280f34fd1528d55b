#include <algorithm>
#include <cmath>
#include <functional>

#include "gvb/kernel.hpp"

namespace gvb {

namespace {

double diff_norm(const KernelOperator& a, const KernelOperator& b) { return l2k_norm(a - b); }

double rel(double residual, double scale) { return residual / std::max(1.0, scale); }

struct Accumulator {
  std::vector<SelftestRow> rows;
  double tol;

  void record(const std::string& name, int level, double residual) {
    auto it = std::find_if(rows.begin(), rows.end(),
                           [&](const SelftestRow& r) { return r.identity == name && r.level == level; });
    if (it == rows.end()) {
      rows.push_back({name, level, 0.0, tol, true});
      it = rows.end() - 1;
    }
    it->residual = std::max(it->residual, residual);
    it->pass = it->residual <= tol;
  }
};

}  // namespace

std::vector<SelftestRow> kernel_selftest(const FlatBundle& F, int max_level, int samples, std::uint64_t seed,
                                         double tol) {
  if (max_level < 0 || samples < 1) throw InvalidInput("selftest needs max_level >= 0 and samples >= 1");
  const KernelSpacePtr S = make_kernel_space(F, std::max(kDefaultLevelCap, max_level + 2));
  const int d = F.graph.degree();
  const CMat delta = laplacian_matrix(F);
  const double dnorm = delta.norm();
  std::mt19937_64 rng(seed);
  Accumulator acc{{}, tol};

  for (int k = 0; k <= max_level; ++k) {
    const KernelOperator I = identity_kernel(S, k);
    const CMat h = chebyshev_h_matrix(delta, d, k);
    acc.record("chebyshev", k, rel((to_matrix(I) - h).norm(), h.norm()));
    acc.record("grad_identity", k, rel(l2k_norm(grad(I)), l2k_norm(I)));
    acc.record("reverse_identity", k, rel(diff_norm(reverse(I), I), l2k_norm(I)));

    for (int n = 0; n < samples; ++n) {
      const KernelOperator Q = random_kernel(S, k, rng);
      const KernelOperator Rup = random_kernel(S, k + 1, rng);
      const KernelOperator R2 = random_kernel(S, k + 2, rng);
      const double q2 = std::pow(l2k_norm(Q), 2);

      const KernelOperator C = cut(Q, k + 1);
      acc.record("cut_scaling", k, rel(std::abs(std::pow(l2k_norm(C), 2) - (k == 0 ? d : d - 1) * q2), q2));

      const KernelOperator O = reverse(Q);
      acc.record("reverse_isometry", k, rel(std::abs(l2k_norm(O) - l2k_norm(Q)), l2k_norm(Q)));
      acc.record("reverse_involution", k, rel(diff_norm(reverse(O), Q), l2k_norm(Q)));

      const KernelOperator T = truncate(Q);
      acc.record("truncate_cocut", k, rel(diff_norm(T, cut(reverse(cut(reverse(Q), k + 1)), k + 2)), l2k_norm(T)));
      const double tt = k == 0 ? double(d) * (d - 1) : double(d - 1) * (d - 1);
      acc.record("truncate_isometry", k, rel(diff_norm(truncate_adj(T), cplx(tt) * Q), tt * l2k_norm(Q)));
      acc.record("truncate_adjoint", k,
                 rel(std::abs(inner(T, R2) - inner(Q, truncate_adj(R2))), l2k_norm(T) * l2k_norm(R2)));

      const KernelOperator G = grad(Q);
      acc.record("grad_adjoint", k,
                 rel(std::abs(inner(G, Rup) - inner(Q, grad_adj(Rup))), l2k_norm(G) * l2k_norm(Rup)));
      acc.record("grad_adj_formula", k + 1,
                 rel(diff_norm(grad_adj(Rup), cplx(-1.0 / (d - 1)) * truncate_adj(grad(Rup))), l2k_norm(Rup)));
      if (k >= 1) acc.record("grad_bound", k, std::max(0.0, l2k_norm(G) - 2 * std::sqrt(d - 1.0) * l2k_norm(Q)));

      const KernelOperator B = nb(Q), Bs = nb_adj(Q);
      const KernelOperator Rk = random_kernel(S, k, rng);
      acc.record("nb_adjoint", k, rel(std::abs(inner(B, Rk) - inner(Q, nb_adj(Rk))), l2k_norm(B) * l2k_norm(Rk)));
      if (k >= 1) {
        acc.record("nb_bound", k, std::max(0.0, l2k_norm(B) - (d - 1) * l2k_norm(Q)));
        acc.record("nb_cut_commute", k, rel(diff_norm(nb(C), cut(B, k + 1)), l2k_norm(C)));
      }
      const KernelOperator GG = grad_adj(G);
      const KernelOperator expect =
          k == 0 ? cplx(2.0) * (cplx(d) * Q - B) : cplx(2.0 * (d - 1)) * Q - B - Bs;
      acc.record("grad_adj_grad", k, rel(diff_norm(GG, expect), l2k_norm(GG)));

      const LevelDecomposition ad = commutator(Q);
      const CMat M = to_matrix(Q);
      const CMat comm = delta * M - M * delta;
      acc.record("commutator_matrix", k, rel((to_matrix(ad) - comm).norm(), dnorm * M.norm()));
      double ad2 = 0;
      for (const auto& [lev, part] : ad.parts) ad2 += std::pow(l2k_norm(part), 2);
      acc.record("commutator_bound", k, std::max(0.0, std::sqrt(ad2) - 4 * std::sqrt(double(d)) * l2k_norm(Q)));
      // ⟨ad Q, R⟩ = ⟨Q, ad R⟩ with R spread over levels k±1
      cplx lhs = inner(ad.parts.at(k + 1), Rup), rhs = inner(Q, commutator(Rup).parts.at(k));
      if (k >= 1) {
        const KernelOperator Rdn = random_kernel(S, k - 1, rng);
        lhs += inner(ad.parts.at(k - 1), Rdn);
        rhs += inner(Q, commutator(Rdn).parts.at(k));
      }
      acc.record("commutator_selfadjoint", k, rel(std::abs(lhs - rhs), l2k_norm(Q) * l2k_norm(Rup)));
    }
  }
  return acc.rows;
}

}  // namespace gvb

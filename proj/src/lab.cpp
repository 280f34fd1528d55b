#include "gvb/lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

namespace gvb {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr int kMaxCallableBand = 512;

}  // namespace

GapReport gap_report(const std::vector<RVec>& spectra, int d, double eps, double tol) {
  GapReport rep;
  rep.eps = eps;
  rep.d = d;
  rep.top_over_family = -std::numeric_limits<double>::infinity();
  bool all_within = true;
  for (size_t i = 0; i < spectra.size(); ++i) {
    GapRow row;
    row.index = static_cast<int>(i);
    row.top_nontrivial = -std::numeric_limits<double>::infinity();
    row.bottom = spectra[i].size() ? spectra[i].minCoeff() : 0.0;
    for (double lam : spectra[i]) {
      if (std::abs(lam - d) <= tol) {
        ++row.plus_d;
      } else {
        if (std::abs(lam + d) <= tol) ++row.minus_d;
        row.top_nontrivial = std::max(row.top_nontrivial, lam);
      }
    }
    row.within_gap = row.top_nontrivial <= d - eps + tol && row.bottom >= -d - tol;
    all_within = all_within && row.within_gap;
    rep.total_plus_d += row.plus_d;
    rep.top_over_family = std::max(rep.top_over_family, row.top_nontrivial);
    rep.rows.push_back(row);
  }
  rep.exp_truncation = rep.total_plus_d <= 1;
  rep.pass = all_within && rep.exp_truncation;
  return rep;
}

GapReport gap_report(const std::vector<FlatBundle>& family, double eps, double tol) {
  if (family.empty()) throw InvalidInput("empty bundle family");
  std::vector<RVec> spectra;
  for (const auto& F : family) spectra.push_back(eigenvalues(laplacian_matrix(F)));
  return gap_report(spectra, family.front().graph.degree(), eps, tol);
}

std::vector<CMat> mixed_observable(const FlatBundle& F, const std::vector<SphereFunction>& f_per_vertex) {
  const int n = F.graph.vertex_count();
  if (static_cast<int>(f_per_vertex.size()) != n)
    throw InvalidInput("need one observable per vertex (" + std::to_string(n) + "), got " +
                       std::to_string(f_per_vertex.size()));
  const int p = F.fiber_dim - 1;
  std::vector<CMat> blocks;
  blocks.reserve(static_cast<size_t>(n));
  for (const auto& f : f_per_vertex) {
    if (!f.is_polynomial() && (f.band < 0 || f.band + p > kMaxCallableBand))
      throw InvalidInput("observable band " + std::to_string(f.band) + " overflows the quadrature cap");
    blocks.push_back(toeplitz(f, p));
  }
  return blocks;
}

std::vector<CMat> mixed_observable(const FlatBundle& F, const SphereFunction& f) {
  return mixed_observable(F, std::vector<SphereFunction>(static_cast<size_t>(F.graph.vertex_count()), f));
}

CMat block_diagonal(const std::vector<CMat>& blocks) {
  Eigen::Index n = 0;
  for (const auto& b : blocks) n += b.rows();
  CMat M = CMat::Zero(n, n);
  Eigen::Index off = 0;
  for (const auto& b : blocks) {
    M.block(off, off, b.rows(), b.cols()) = b;
    off += b.rows();
  }
  return M;
}

std::vector<QeRow> qe_experiment(int p0, const std::vector<int>& p1s, const std::vector<int>& ps,
                                 const SpherePoly& f, std::int64_t dense_cap) {
  const SpherePoly centered = f - SpherePoly::constant(sphere_integral(f));
  std::vector<QeRow> rows;
  for (int p1 : p1s) {
    const CayleyGraph cg = cayley_graph(p0, p1);
    for (int p : ps) {
      if (p < 0) throw InvalidInput("negative representation degree");
      const std::int64_t dim = std::int64_t(cg.graph.vertex_count()) * (p + 1);
      if (dim > dense_cap)
        throw BudgetExceeded("matrix dimension " + std::to_string(dim) + " exceeds the dense cap " +
                             std::to_string(dense_cap) + "; lower p or raise the cap");
      const auto t0 = Clock::now();
      const FlatBundle F = cayley_bundle(cg, p);
      const Spectrum S = eigendecompose(laplacian_matrix(F));
      const CMat T = toeplitz(centered, p);
      const std::vector<CMat> blocks(static_cast<size_t>(cg.graph.vertex_count()), T);
      QeRow row;
      row.p1 = p1;
      row.p = p;
      row.variance = quantum_variance_blockdiag(blocks, S);
      row.dim = dim;
      row.seconds = seconds_since(t0);
      rows.push_back(row);
    }
  }
  return rows;
}

ZeroExperiment zero_experiment(int p0, int p1, const std::vector<int>& ps, const std::vector<SpherePoly>& tests,
                               double threshold_c, int emit_sections, std::int64_t dense_cap) {
  if (tests.empty()) throw InvalidInput("no test functions");
  const CayleyGraph cg = cayley_graph(p0, p1);
  const int nv = cg.graph.vertex_count();
  std::vector<double> means;
  for (const auto& g : tests) means.push_back(sphere_integral(g));

  ZeroExperiment out;
  for (int p : ps) {
    if (p < 1) throw InvalidInput("zero experiment needs p >= 1");
    const std::int64_t dim = std::int64_t(nv) * (p + 1);
    if (dim > dense_cap)
      throw BudgetExceeded("matrix dimension " + std::to_string(dim) + " exceeds the dense cap " +
                           std::to_string(dense_cap));
    const auto t0 = Clock::now();
    const Spectrum S = eigendecompose(laplacian_matrix(cayley_bundle(cg, p)));
    ZeroRow row;
    row.p = p;
    row.sections = static_cast<int>(S.size());
    row.threshold = threshold_c / std::sqrt(double(p));
    std::vector<double> disc;
    for (int i = 0; i < row.sections; ++i) {
      std::vector<double> acc(tests.size(), 0.0);
      std::int64_t count = 0;
      int degenerate = 0;
      for (int x = 0; x < nv; ++x) {
        FockSection s{p, S.vectors.col(i).segment(std::int64_t(x) * (p + 1), p + 1)};
        if (s.coeffs.norm() < 1e-10) {
          ++degenerate;
          continue;
        }
        for (const Root& r : roots(s)) {
          count += r.multiplicity;
          const Eigen::Vector3d n = r.point.sphere();
          for (size_t t = 0; t < tests.size(); ++t) acc[t] += r.multiplicity * tests[t](n);
          if (i < emit_sections)
            out.points.push_back({i, x, r.point.theta(), r.point.phi(), r.multiplicity});
        }
      }
      row.degenerate_vertices += degenerate;
      if (degenerate == 0) {
        ++row.nondegenerate_sections;
        if (count == std::int64_t(p) * nv) ++row.exact_count_sections;
      }
      double D = 0;
      for (size_t t = 0; t < tests.size(); ++t)
        D = std::max(D, std::abs(acc[t] / double(count) - means[t]));
      disc.push_back(D);
    }
    std::sort(disc.begin(), disc.end());
    const size_t m = disc.size();
    row.median_discrepancy = m % 2 ? disc[m / 2] : 0.5 * (disc[m / 2 - 1] + disc[m / 2]);
    row.fraction_below =
        double(std::lower_bound(disc.begin(), disc.end(), row.threshold) - disc.begin()) / double(m);
    row.seconds = seconds_since(t0);
    out.rows.push_back(row);
  }
  return out;
}

namespace {

struct HarmonicBasis {
  int q = 0;
  std::vector<SpherePoly> polys;
  std::vector<QuadratureNode> nodes;  ///< exact for products of two degree-q polynomials
  RMat values;                        ///< nodes × (2q+1)
};

std::vector<SpherePoly::Exponent> monomials_up_to(int q) {
  std::vector<SpherePoly::Exponent> out;
  for (int deg = 0; deg <= q; ++deg)
    for (int a = deg; a >= 0; --a)
      for (int b = deg - a; b >= 0; --b) out.push_back({a, b, deg - a - b});
  return out;
}

SpherePoly monomial(const SpherePoly::Exponent& e) {
  SpherePoly m = SpherePoly::constant(1.0);
  for (int i = 0; i < 3; ++i) m = m * SpherePoly::coordinate(i).pow(e[static_cast<size_t>(i)]);
  return m;
}

// Orthonormal basis of span{n^α : |α| ≤ q} ⊖ span{n^α : |α| < q} in L²(S², dv).
HarmonicBasis make_harmonic_basis(int q) {
  if (q < 0) throw InvalidInput("harmonic degree must be non-negative");
  HarmonicBasis hb;
  hb.q = q;
  hb.nodes = quadrature_grid(2 * q);
  const auto mons = monomials_up_to(q);
  const auto M = static_cast<Eigen::Index>(mons.size());
  const auto L = static_cast<Eigen::Index>(q * (q + 1) * (q + 2) / 6);  // monomials of degree < q
  const auto nn = static_cast<Eigen::Index>(hb.nodes.size());
  RMat V(nn, M);
  RVec w(nn);
  for (Eigen::Index r = 0; r < nn; ++r) {
    const auto& node = hb.nodes[static_cast<size_t>(r)];
    w[r] = node.weight;
    for (Eigen::Index c = 0; c < M; ++c) {
      const auto& e = mons[static_cast<size_t>(c)];
      V(r, c) = std::pow(node.n[0], e[0]) * std::pow(node.n[1], e[1]) * std::pow(node.n[2], e[2]);
    }
  }
  const RMat G = V.transpose() * w.asDiagonal() * V;
  RMat N = RMat::Identity(M, M);
  if (L > 0) {
    const RMat B = G.topRows(L);
    Eigen::JacobiSVD<RMat> svd(B, Eigen::ComputeFullV);
    const RVec& sv = svd.singularValues();
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv[rank] > 1e-10 * sv[0]) ++rank;
    N = svd.matrixV().rightCols(M - rank);
  }
  const RMat GN = N.transpose() * G * N;
  Eigen::SelfAdjointEigenSolver<RMat> es(GN);
  const RVec& ev = es.eigenvalues();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev[i] > 1e-10 * ev.maxCoeff()) keep.push_back(i);
  if (static_cast<int>(keep.size()) != 2 * q + 1)
    throw NumericalError("harmonic space of degree " + std::to_string(q) + " has numerical dimension " +
                         std::to_string(keep.size()));
  RMat C(M, 2 * q + 1);
  for (size_t a = 0; a < keep.size(); ++a)
    C.col(static_cast<Eigen::Index>(a)) = N * es.eigenvectors().col(keep[a]) / std::sqrt(ev[keep[a]]);
  for (Eigen::Index a = 0; a < C.cols(); ++a) {
    SpherePoly h;
    for (Eigen::Index m = 0; m < M; ++m)
      if (C(m, a) != 0) h = h + monomial(mons[static_cast<size_t>(m)]) * C(m, a);
    hb.polys.push_back(h);
  }
  hb.values = V * C;
  return hb;
}

RMat harmonic_rep(const HarmonicBasis& hb, const CMat2& g) {
  const Eigen::Matrix3d Rinv = so3_of(g).transpose();
  const auto nn = static_cast<Eigen::Index>(hb.nodes.size());
  const auto k = static_cast<Eigen::Index>(hb.polys.size());
  RMat moved(nn, k);
  for (Eigen::Index r = 0; r < nn; ++r) {
    const Eigen::Vector3d m = Rinv * hb.nodes[static_cast<size_t>(r)].n;
    for (Eigen::Index b = 0; b < k; ++b) moved(r, b) = hb.polys[static_cast<size_t>(b)](m);
  }
  RVec w(nn);
  for (Eigen::Index r = 0; r < nn; ++r) w[r] = hb.nodes[static_cast<size_t>(r)].weight;
  return hb.values.transpose() * w.asDiagonal() * moved;
}

FlatBundle harmonic_bundle(const CayleyGraph& cg, const HarmonicBasis& hb, double* orth_defect) {
  std::vector<CMat> per_gen;
  double defect = 0;
  for (const auto& a : cg.generators) {
    const RMat D = harmonic_rep(hb, su2_of(a, cg.p0));
    defect = std::max(defect, (D.transpose() * D - RMat::Identity(D.rows(), D.cols())).norm());
    per_gen.push_back(D.cast<cplx>());
  }
  if (orth_defect) *orth_defect = defect;
  std::map<int, CMat> tr;
  for (const auto& e : cg.graph.edges())
    if (e.id < e.reversal) tr.emplace(e.id, per_gen[static_cast<size_t>(cg.generator_of_edge(e.id))]);
  return make_bundle(cg.graph, tr);
}

}  // namespace

std::vector<SpherePoly> harmonic_basis(int q) { return make_harmonic_basis(q).polys; }

RMat harmonic_rep(const CMat2& g, int q) { return harmonic_rep(make_harmonic_basis(q), g); }

FlatBundle harmonic_bundle(const CayleyGraph& cg, int q) {
  return harmonic_bundle(cg, make_harmonic_basis(q), nullptr);
}

HarmonicReport harmonic_block_check(int p0, int p1, int q, double tol) {
  HarmonicReport rep;
  rep.q = q;
  rep.dim = 2 * q + 1;
  const CayleyGraph cg = cayley_graph(p0, p1);
  const FlatBundle H = harmonic_bundle(cg, make_harmonic_basis(q), &rep.max_rep_orthogonality_defect);
  const RVec a = eigenvalues(laplacian_matrix(H));
  const RVec b = eigenvalues(laplacian_matrix(cayley_bundle(cg, 2 * q)));
  if (a.size() != b.size()) throw NumericalError("harmonic and symmetric-power bundles differ in rank");
  rep.max_spectral_difference = (a - b).cwiseAbs().maxCoeff();
  rep.pass = rep.max_spectral_difference <= tol;
  return rep;
}

AlonBoppanaReport alon_boppana_report(const RegularGraph& g, int k_max) {
  AlonBoppanaReport rep;
  rep.d = g.degree();
  rep.ramanujan = 2 * std::sqrt(double(rep.d - 1));
  const int n = g.vertex_count();
  std::vector<int> inj(static_cast<size_t>(n));
  for (int x = 0; x < n; ++x) inj[static_cast<size_t>(x)] = injectivity_radius(g, x);
  for (int k = 1; k <= k_max; ++k) {
    AlonBoppanaRow row;
    row.k = k;
    const auto good = std::count_if(inj.begin(), inj.end(), [k](int r) { return r >= k; });
    row.good_fraction = double(good) / n;
    row.bad_fraction = 1.0 - row.good_fraction;
    const double dk = std::pow(double(rep.d), 2 * k);
    const double tree = tree_closed_walks(rep.d, 2 * k).convert_to<double>();
    row.rhs = row.good_fraction * tree - (row.bad_fraction + 2.0 / n) * dk;
    row.vacuous = !(row.rhs > 0);
    row.bound = row.vacuous ? 0.0 : std::pow(row.rhs, 1.0 / (2 * k));
    rep.best_bound = std::max(rep.best_bound, row.bound);
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace gvb

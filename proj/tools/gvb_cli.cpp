// gvb: build bundles, run checks and experiments, emit CSV/SVG reports.
//
// Exit codes: 0 all assertions pass, 1 an assertion failed, 2 invalid input.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gvb/bundle.hpp"
#include "gvb/cp1.hpp"
#include "gvb/graph.hpp"
#include "gvb/io.hpp"
#include "gvb/kernel.hpp"
#include "gvb/lab.hpp"
#include "gvb/lps.hpp"
#include "gvb/spectral.hpp"

using namespace gvb;
namespace fs = std::filesystem;

namespace {

constexpr int kExitPass = 0, kExitFail = 1, kExitInvalid = 2;

struct Config {
  std::string command;
  std::string in, out, emit = "csv", config_file;
  std::string graph = "petersen";
  int p0 = 13, p1 = 5, p = 1, l = 2, k = 6, q = 1, bins = 40, levels = 3, samples = 20;
  std::uint64_t seed = 1;
  double tol = 1e-6, bound = -1, threshold_c = 0.5;
  std::int64_t cap = kDefaultDenseCap;
  int emit_sections = 4;
  std::string f = "n3";
  std::vector<int> p1s{5}, ps{1, 2, 4, 8, 16};
  std::vector<std::string> tests{"n3", "n3^2", "n1*n2"};
  bool identity = false;
};

Json config_json(const Config& c) {
  return {{"command", c.command}, {"in", c.in},         {"out", c.out},       {"emit", c.emit},
          {"config", c.config_file}, {"graph", c.graph}, {"p0", c.p0},         {"p1", c.p1},
          {"p", c.p},             {"l", c.l},           {"k", c.k},           {"q", c.q},
          {"bins", c.bins},       {"levels", c.levels}, {"samples", c.samples}, {"seed", c.seed},
          {"tol", c.tol},       {"bound", c.bound},   {"threshold_c", c.threshold_c},
          {"cap", c.cap},         {"emit_sections", c.emit_sections}, {"f", c.f}, {"p1s", c.p1s},
          {"ps", c.ps},           {"tests", c.tests},   {"identity", c.identity}};
}

RegularGraph parse_graph(const std::string& spec) {
  const auto colon = spec.find(':');
  const std::string kind = spec.substr(0, colon);
  auto arg = [&]() {
    if (colon == std::string::npos) throw InvalidInput("graph '" + spec + "' needs a size, e.g. " + kind + ":6");
    try {
      return std::stoi(spec.substr(colon + 1));
    } catch (const std::exception&) {
      throw InvalidInput("bad graph size in '" + spec + "'");
    }
  };
  if (kind == "petersen") return petersen_graph();
  if (kind == "cycle") return cycle_graph(arg());
  if (kind == "bouquet") return bouquet_graph(arg());
  if (kind == "complete") return complete_graph(arg());
  if (fs::exists(spec)) {
    const Json j = read_json(spec);
    return j.contains("graph") ? graph_from_json(j.at("graph")) : graph_from_json(j);
  }
  throw InvalidInput("unknown graph '" + spec + "' (petersen, cycle:N, bouquet:K, complete:N or a JSON file)");
}

FlatBundle load_bundle(const Config& c) {
  if (c.in.empty()) throw InvalidInput("--in is required");
  return read_bundle(c.in).bundle;
}

std::string require_out(const Config& c) {
  if (c.out.empty()) throw InvalidInput("--out is required");
  return c.out;
}

std::string with_extension(const std::string& path, const std::string& ext) {
  return fs::path(path).replace_extension(ext).string();
}

void write_meta(const Config& c, const std::string& artifact, double seconds, const Json& results) {
  const Json meta = {{"config", config_json(c)},
                     {"version", kVersion},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"wall_clock_seconds", seconds},
                     {"results", results}};
  write_text(with_extension(artifact, ".meta.json"), dump_json(meta));
}

// Writes the CSV (always; the SVG is rendered from it) and removes it again for --emit svg.
void emit_table(const Config& c, const Table& t, const PlotSpec& plot) {
  const std::string csv = require_out(c);
  write_csv(csv, t);
  if (c.emit == "svg" || c.emit == "both") csv_to_svg(csv, with_extension(csv, ".svg"), plot);
  if (c.emit == "svg") fs::remove(csv);
}

int verdict(bool ok) {
  std::printf("%s\n", ok ? "PASS" : "FAIL");
  return ok ? kExitPass : kExitFail;
}

using Clock = std::chrono::steady_clock;

int cmd_lps_build(const Config& c, Json& results) {
  const CayleyGraph cg = cayley_graph(c.p0, c.p1);
  const FlatBundle F = cayley_bundle(cg, c.p);
  Json labels = Json::array();
  for (const auto& g : cg.labels) labels.push_back(g.m);
  Json gens = Json::array();
  for (const auto& a : cg.generators) gens.push_back({a.a0, a.a1, a.a2, a.a3});
  const Json meta = {{"kind", "cayley"}, {"p0", c.p0},          {"p1", c.p1},
                     {"p", c.p},         {"b", cg.b},           {"group", cg.pgl ? "PGL2" : "PSL2"},
                     {"bipartite", cg.bipartite}, {"vertices", cg.graph.vertex_count()}, {"generators", gens},
                     {"labels", labels}, {"version", kVersion}};
  write_bundle(require_out(c), F, meta);
  std::printf("|X|=%d d=%d fiber_dim=%d group=%s\n", cg.graph.vertex_count(), cg.graph.degree(), F.fiber_dim,
              cg.pgl ? "PGL2" : "PSL2");
  results = {{"vertices", cg.graph.vertex_count()}, {"degree", cg.graph.degree()}};
  return kExitPass;
}

int cmd_bundle_random(const Config& c, Json& results) {
  const RegularGraph g = parse_graph(c.graph);
  const FlatBundle F = c.identity ? trivial_bundle(g, c.l) : random_bundle(g, c.l, c.seed);
  const Json meta = {{"kind", c.identity ? "trivial" : "haar"}, {"graph", c.graph}, {"l", c.l},
                     {"seed", c.seed}, {"version", kVersion}};
  write_bundle(require_out(c), F, meta);
  std::printf("|X|=%d d=%d fiber_dim=%d\n", g.vertex_count(), g.degree(), F.fiber_dim);
  results = {{"vertices", g.vertex_count()}, {"degree", g.degree()}};
  return kExitPass;
}

int cmd_spectrum(const Config& c, Json& results) {
  const FlatBundle F = load_bundle(c);
  const RVec ev = eigenvalues(laplacian_matrix(F));
  Table t{{"index", "lambda"}, {}};
  for (Eigen::Index i = 0; i < ev.size(); ++i) t.add({std::to_string(i), format_double(ev[i])});
  emit_table(c, t, {"eigenvalues", "index", {"lambda"}, false, "", false});
  const RadiusReport r = nontrivial_radius(ev, F.graph.degree(), c.tol);
  std::printf("%lld eigenvalues, nontrivial radius %.10f (+d x%d, -d x%d)\n", static_cast<long long>(ev.size()),
              r.radius, r.excluded_plus, r.excluded_minus);
  results = {{"count", ev.size()}, {"radius", r.radius}};
  return kExitPass;
}

int cmd_check_ramanujan(const Config& c, Json& results) {
  const FlatBundle F = load_bundle(c);
  const int d = F.graph.degree();
  const double bound = c.bound > 0 ? c.bound : 2 * std::sqrt(d - 1.0);
  const RadiusReport r = nontrivial_radius(eigenvalues(laplacian_matrix(F)), d, c.tol);
  std::printf("max nontrivial |lambda| = %.10f, bound %.10f, excluded +d x%d, -d x%d\n", r.radius, bound,
              r.excluded_plus, r.excluded_minus);
  results = {{"radius", r.radius}, {"bound", bound}, {"excluded_plus", r.excluded_plus},
             {"excluded_minus", r.excluded_minus}};
  return verdict(r.radius <= bound + 1e-6);
}

int cmd_check_trace(const Config& c, Json& results) {
  const FlatBundle F = load_bundle(c);
  double worst = 0;
  for (int k = 0; k <= c.k; ++k) {
    const double a = trace_power_dense(F, k), b = trace_power_oracle(F, k);
    const double rel = std::abs(a - b) / std::max(1.0, std::abs(a));
    worst = std::max(worst, rel);
    std::printf("k=%d  Tr=%.12g  holonomy=%.12g  rel=%.2e\n", k, a, b, rel);
  }
  results = {{"max_relative_defect", worst}};
  return verdict(worst <= 1e-8);
}

int cmd_check_chebyshev(const Config& c, Json& results) {
  const FlatBundle F = load_bundle(c);
  const CMat delta = laplacian_matrix(F);
  double worst = 0;
  for (int k = 0; k <= c.k; ++k) {
    const double r = (identity_kernel_matrix(F, k) - chebyshev_h_matrix(delta, F.graph.degree(), k)).norm();
    worst = std::max(worst, r);
    std::printf("k=%d  residual %.2e\n", k, r);
  }
  results = {{"max_residual", worst}};
  return verdict(worst <= 1e-8);
}

int cmd_check_b1(const Config& c, Json& results) {
  const FlatBundle F = load_bundle(c);
  const B1Report r = b1_structure_report(F, c.tol);
  std::printf("dim %lld, match error %.2e, pairing residual %.2e\n", static_cast<long long>(r.dim),
              r.max_match_error, r.max_pairing_residual);
  std::printf("mult(+1)=%d mult(-1)=%d; oracle %d/%d; printed formula %d/%d%s\n", r.mult_plus_one,
              r.mult_minus_one, r.oracle_plus_one, r.oracle_minus_one, r.printed_plus_one, r.printed_minus_one,
              r.sign_assignment_discrepancy ? " (sign assignment discrepancy flagged)" : "");
  if (r.ambiguous_clusters) std::printf("warning: ambiguous eigenvalue clusters at tol %.1e\n", c.tol);
  results = {{"match_error", r.max_match_error}, {"pairing_residual", r.max_pairing_residual},
             {"sign_assignment_discrepancy", r.sign_assignment_discrepancy}};
  return verdict(r.spectrum_matches && r.pairing_ok);
}

int cmd_check_toeplitz(const Config& c, Json& results) {
  const SpherePoly f = SpherePoly::parse(c.f);
  const ToeplitzNormReport r = toeplitz_norm_check(f, c.p);
  const double tr_defect = std::abs(toeplitz(f, c.p).trace() - double(c.p + 1) * sphere_integral(f));
  const double gram = (gram_quadrature(c.p, c.p) - CMat::Identity(c.p + 1, c.p + 1)).cwiseAbs().maxCoeff();
  std::printf("f=%s p=%d  ||T||=%.10f  grid max|f|=%.10f  ||T||_HS^2/(p+1)=%.10f  int f^2=%.10f\n",
              f.to_string().c_str(), c.p, r.op_norm, r.grid_max, r.hs_normalized, r.l2_sq);
  std::printf("trace defect %.2e, Gram defect %.2e\n", tr_defect, gram);
  results = {{"op_norm", r.op_norm}, {"grid_max", r.grid_max}, {"trace_defect", tr_defect}, {"gram_defect", gram}};
  return verdict(r.norm_ok && tr_defect <= 1e-12 && gram <= 1e-12);
}

int cmd_check_kernel(const Config& c, Json& results) {
  const FlatBundle F = load_bundle(c);
  const KernelCharacterization kc = kernel_characterization(F, c.k);
  std::printf("levels <= %d: commutator nullspace dim %d (expected %d), identity residual %.2e\n", kc.max_level,
              kc.null_dimension, kc.expected_dimension, kc.identity_residual);
  const KernelSpacePtr S = make_kernel_space(F);
  std::mt19937_64 rng(c.seed);
  bool ok = kc.pass;
  Json hs = Json::array();
  for (int k = 0; k <= std::min(c.k, 3); ++k) {
    const HsL2Report h = hs_vs_l2_check(random_kernel(S, k, rng));
    std::printf("level %d: hs^2=%.10f l2^2=%.10f defect %.2e (%s, bound %.3g)\n", k, h.hs2, h.l2sq, h.defect,
                h.exact_regime ? "exact" : "bounded", h.bound);
    ok = ok && h.pass;
    hs.push_back({{"level", k}, {"defect", h.defect}, {"pass", h.pass}});
  }
  results = {{"null_dimension", kc.null_dimension}, {"expected", kc.expected_dimension}, {"hs_vs_l2", hs}};
  return verdict(ok);
}

int cmd_km(const Config& c, Json& results) {
  const FlatBundle F = load_bundle(c);
  const int d = F.graph.degree();
  const RVec ev = eigenvalues(laplacian_matrix(F));
  std::vector<double> kept;
  for (double x : ev)
    if (std::abs(std::abs(x) - d) > c.tol) kept.push_back(x);
  const double edge = 2 * std::sqrt(d - 1.0);
  const double lo = std::min(-edge, kept.empty() ? -edge : *std::min_element(kept.begin(), kept.end()));
  const double hi = std::max(edge, kept.empty() ? edge : *std::max_element(kept.begin(), kept.end()));
  Table t{{"bin_left", "bin_right", "empirical", "km_mass"}, {}};
  for (int b = 0; b < c.bins; ++b) {
    const double a = lo + (hi - lo) * b / c.bins, z = lo + (hi - lo) * (b + 1) / c.bins;
    const auto n = std::count_if(kept.begin(), kept.end(),
                                 [&](double x) { return x >= a && (x < z || (b == c.bins - 1 && x <= z)); });
    t.add({format_double(a), format_double(z), format_double(kept.empty() ? 0.0 : double(n) / kept.size()),
           format_double(km_mass(d, a, z))});
  }
  emit_table(c, t, {"Kesten-McKay", "bin_left", {"empirical", "km_mass"}, true, "bin_right", false});
  const double ks = ks_distance(ev, d, c.tol);
  std::printf("KS distance %.6f over %zu nontrivial eigenvalues\n", ks, kept.size());
  results = {{"ks", ks}};
  return kExitPass;
}

int cmd_logdet(const Config& c, Json& results) {
  const FlatBundle F = load_bundle(c);
  const int d = F.graph.degree();
  const double v = logdet(eigenvalues(laplacian_matrix(F)), d, c.tol);
  const double k = logdet_limit_constant(d);
  std::printf("logdet %.10f, limit constant %.10f, difference %.3e\n", v, k, v - k);
  results = {{"logdet", v}, {"constant", k}};
  return kExitPass;
}

int cmd_qe(const Config& c, Json& results) {
  const auto rows = qe_experiment(c.p0, c.p1s, c.ps, SpherePoly::parse(c.f), c.cap);
  Table t{{"p1", "p", "variance", "dim", "seconds"}, {}};
  for (const auto& r : rows) {
    t.add({std::to_string(r.p1), std::to_string(r.p), format_double(r.variance), std::to_string(r.dim), "0"});
    std::printf("p1=%d p=%d  Var=%.8f  dim=%lld  %.2fs\n", r.p1, r.p, r.variance, static_cast<long long>(r.dim),
                r.seconds);
  }
  // runtimes go to the metadata so that the CSV stays reproducible
  Json secs = Json::array();
  for (const auto& r : rows) secs.push_back({{"p1", r.p1}, {"p", r.p}, {"seconds", r.seconds}});
  emit_table(c, t, {"quantum variance", "p", {"variance"}, false, "", true});
  results = {{"seconds", secs}};
  return kExitPass;
}

int cmd_zeros(const Config& c, Json& results) {
  std::vector<SpherePoly> tests;
  for (const auto& s : c.tests) tests.push_back(SpherePoly::parse(s));
  const ZeroExperiment z = zero_experiment(c.p0, c.p1, c.ps, tests, c.threshold_c, c.emit_sections, c.cap);
  Table t{{"section_index", "vertex", "theta", "phi", "multiplicity"}, {}};
  for (const auto& pt : z.points)
    t.add({std::to_string(pt.section), std::to_string(pt.vertex), format_double(pt.theta), format_double(pt.phi),
           std::to_string(pt.multiplicity)});
  emit_table(c, t, {"zeros", "theta", {"phi"}, false, "", false});
  Json rows = Json::array();
  bool counts_ok = true;
  for (const auto& r : z.rows) {
    std::printf("p=%d  sections=%d  exact counts %d/%d  degenerate vertices %lld  median D=%.6f  "
                "frac(D<%.4f)=%.4f  %.1fs\n",
                r.p, r.sections, r.exact_count_sections, r.nondegenerate_sections,
                static_cast<long long>(r.degenerate_vertices), r.median_discrepancy, r.threshold, r.fraction_below,
                r.seconds);
    counts_ok = counts_ok && r.exact_count_sections == r.nondegenerate_sections;
    rows.push_back({{"p", r.p}, {"median_discrepancy", r.median_discrepancy}, {"fraction_below", r.fraction_below},
                    {"exact_count_sections", r.exact_count_sections},
                    {"nondegenerate_sections", r.nondegenerate_sections},
                    {"degenerate_vertices", r.degenerate_vertices}});
  }
  results = {{"rows", rows}};
  return verdict(counts_ok);
}

int cmd_harmonic(const Config& c, Json& results) {
  const HarmonicReport h = harmonic_block_check(c.p0, c.p1, c.q);
  std::printf("q=%d dim=%d  max spectral difference %.2e  rotation orthogonality defect %.2e\n", h.q, h.dim,
              h.max_spectral_difference, h.max_rep_orthogonality_defect);
  results = {{"q", h.q}, {"difference", h.max_spectral_difference}};
  return verdict(h.pass);
}

int cmd_kernel_selftest(const Config& c, Json& results) {
  const FlatBundle F = load_bundle(c);
  const auto rows = kernel_selftest(F, c.levels, c.samples, c.seed);
  Table t{{"identity", "level", "residual"}, {}};
  bool ok = true;
  for (const auto& r : rows) {
    t.add({r.identity, std::to_string(r.level), format_double(r.residual)});
    ok = ok && r.pass;
    if (!r.pass) std::printf("FAIL %s level %d residual %.3e\n", r.identity.c_str(), r.level, r.residual);
  }
  emit_table(c, t, {"kernel selftest residuals", "level", {"residual"}, false, "", true});
  std::printf("%zu identities checked\n", rows.size());
  results = {{"checks", rows.size()}};
  return verdict(ok);
}

struct Command {
  CLI::App* app;
  std::string name;
  int (*run)(const Config&, Json&);
};

void add_common(CLI::App* s, Config& c) {
  s->add_option("--emit", c.emit, "csv, svg or both")->check(CLI::IsMember({"csv", "svg", "both"}));
  s->add_option("--config", c.config_file, "INI config; its values override flags");
}

void build_app(CLI::App& app, Config& c, std::vector<Command>& cmds) {
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

  auto* lps = app.add_subcommand("lps", "LPS/Cayley constructions")->require_subcommand(1);
  auto* lb = lps->add_subcommand("build", "Cayley bundle with fiber Sym^p");
  lb->add_option("--p0", c.p0);
  lb->add_option("--p1", c.p1);
  lb->add_option("--p", c.p, "representation degree");
  lb->add_option("--out", c.out);
  cmds.push_back({lb, "lps.build", cmd_lps_build});

  auto* bun = app.add_subcommand("bundle", "bundle constructions")->require_subcommand(1);
  auto* br = bun->add_subcommand("random", "Haar-random bundle on a named graph");
  br->add_option("--graph", c.graph, "petersen, cycle:N, bouquet:K, complete:N or JSON file");
  br->add_option("--l", c.l, "fiber dimension");
  br->add_option("--seed", c.seed);
  br->add_flag("--identity", c.identity, "identity transports instead of Haar");
  br->add_option("--out", c.out);
  cmds.push_back({br, "bundle.random", cmd_bundle_random});

  auto in_opt = [&c](CLI::App* s) { s->add_option("--in", c.in, "bundle JSON"); };
  auto* sp = app.add_subcommand("spectrum", "eigenvalues of the twisted Laplacian");
  in_opt(sp);
  sp->add_option("--out", c.out);
  sp->add_option("--tol", c.tol);
  cmds.push_back({sp, "spectrum", cmd_spectrum});

  auto* chk = app.add_subcommand("check", "assertion checks")->require_subcommand(1);
  auto* cr = chk->add_subcommand("ramanujan", "nontrivial radius against 2 sqrt(d-1)");
  in_opt(cr);
  cr->add_option("--bound", c.bound, "override bound");
  cr->add_option("--tol", c.tol);
  cmds.push_back({cr, "check.ramanujan", cmd_check_ramanujan});
  auto* ct = chk->add_subcommand("trace", "Tr Delta^k against closed-walk holonomies");
  in_opt(ct);
  ct->add_option("--k", c.k);
  cmds.push_back({ct, "check.trace", cmd_check_trace});
  auto* cc = chk->add_subcommand("chebyshev", "Id_(k) against h_k(Delta)");
  in_opt(cc);
  cc->add_option("--k", c.k);
  cmds.push_back({cc, "check.chebyshev", cmd_check_chebyshev});
  auto* cb = chk->add_subcommand("b1", "nonbacktracking level-1 spectrum");
  in_opt(cb);
  cb->add_option("--tol", c.tol);
  cmds.push_back({cb, "check.b1", cmd_check_b1});
  auto* cz = chk->add_subcommand("toeplitz", "Toeplitz trace, norm and Gram checks");
  cz->add_option("--f", c.f, "polynomial in n1, n2, n3");
  cz->add_option("--p", c.p);
  cmds.push_back({cz, "check.toeplitz", cmd_check_toeplitz});
  auto* ck = chk->add_subcommand("kernel", "commutator nullspace and HS vs L2 norms");
  in_opt(ck);
  ck->add_option("--k", c.k, "maximum level");
  ck->add_option("--seed", c.seed);
  cmds.push_back({ck, "check.kernel", cmd_check_kernel});

  auto* km = app.add_subcommand("km", "histogram against Kesten-McKay");
  in_opt(km);
  km->add_option("--out", c.out);
  km->add_option("--bins", c.bins)->check(CLI::PositiveNumber);
  km->add_option("--tol", c.tol);
  cmds.push_back({km, "km", cmd_km});

  auto* ld = app.add_subcommand("logdet", "normalized log-determinant");
  in_opt(ld);
  ld->add_option("--tol", c.tol);
  cmds.push_back({ld, "logdet", cmd_logdet});

  auto* qe = app.add_subcommand("qe", "quantum variance over a (p1, p) grid");
  qe->add_option("--p0", c.p0);
  qe->add_option("--p1", c.p1s)->delimiter(',');
  qe->add_option("--p", c.ps)->delimiter(',');
  qe->add_option("--f", c.f);
  qe->add_option("--cap", c.cap, "dense matrix size cap");
  qe->add_option("--out", c.out);
  qe->get_option("--p1")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  qe->get_option("--p")->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  cmds.push_back({qe, "qe", cmd_qe});

  auto* ze = app.add_subcommand("zeros", "zeros of eigensections");
  ze->add_option("--p0", c.p0);
  ze->add_option("--p1", c.p1);
  ze->add_option("--p", c.ps)->delimiter(',')->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  ze->add_option("--tests", c.tests)->delimiter(';')->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  ze->add_option("--threshold", c.threshold_c, "D threshold is this over sqrt(p)");
  ze->add_option("--emit-sections", c.emit_sections, "sections whose zeros go to the CSV");
  ze->add_option("--cap", c.cap);
  ze->add_option("--out", c.out);
  cmds.push_back({ze, "zeros", cmd_zeros});

  auto* hm = app.add_subcommand("harmonic", "harmonic blocks against Sym^{2q}");
  hm->add_option("--p0", c.p0);
  hm->add_option("--p1", c.p1);
  hm->add_option("--q", c.q)->check(CLI::NonNegativeNumber);
  cmds.push_back({hm, "harmonic", cmd_harmonic});

  auto* st = app.add_subcommand("kernel-selftest", "identity suite of the kernel calculus");
  in_opt(st);
  st->add_option("--levels", c.levels);
  st->add_option("--samples", c.samples);
  st->add_option("--seed", c.seed);
  st->add_option("--out", c.out);
  cmds.push_back({st, "kernel-selftest", cmd_kernel_selftest});

  for (auto& cmd : cmds) add_common(cmd.app, c);
}

// Flags for every config entry in the global section or the section of the active command,
// appended after the command line so that they take precedence.
std::vector<std::string> config_args(const std::string& path, const std::string& active) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config '" + path + "'");
  std::vector<std::string> out;
  for (const auto& item : CLI::ConfigINI().from_config(in)) {
    if (item.name == "++" || item.name == "--" || item.name == "config") continue;
    const std::string section = CLI::detail::join(item.parents, ".");
    if (!section.empty() && section != "default" && section != active) continue;
    out.push_back("--" + item.name);
    for (const auto& v : item.inputs) out.push_back(v);
  }
  return out;
}

int run(int argc, char** argv) {
  Config c;
  CLI::App app{"graph vector bundle laboratory"};
  std::vector<Command> cmds;
  build_app(app, c, cmds);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitPass : kExitInvalid;
  }
  for (const auto& cmd : cmds) {
    if (!cmd.app->parsed()) continue;
    c.command = cmd.name;
    if (!c.config_file.empty()) {
      // second pass over the same Config: config entries overwrite flag values
      std::vector<std::string> args;
      std::stringstream path(cmd.name);
      for (std::string part; std::getline(path, part, '.');) args.push_back(part);
      const auto extra = config_args(c.config_file, cmd.name);
      args.insert(args.end(), extra.begin(), extra.end());
      CLI::App app2{"config"};
      std::vector<Command> cmds2;
      build_app(app2, c, cmds2);
      std::vector<std::string> rev(args.rbegin(), args.rend());
      try {
        app2.parse(rev);
      } catch (const CLI::ParseError& e) {
        std::cerr << "gvb: config '" << c.config_file << "': " << e.what() << "\n";
        return kExitInvalid;
      }
    }
    const auto t0 = Clock::now();
    Json results;
    const int rc = cmd.run(c, results);
    const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
    results["exit_code"] = rc;
    if (!c.out.empty() && fs::exists(fs::path(c.out).parent_path().empty() ? "." : fs::path(c.out).parent_path()))
      write_meta(c, c.out, secs, results);
    return rc;
  }
  return kExitInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const InvalidInput& e) {
    std::cerr << "gvb: invalid input: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const BudgetExceeded& e) {
    std::cerr << "gvb: budget exceeded: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "gvb: " << e.what() << "\n";
    return kExitFail;
  }
}

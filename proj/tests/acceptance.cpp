// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include "latinpgd/io.hpp"
#include "latinpgd/latin.hpp"
#include "latinpgd/run.hpp"

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace latinpgd;
namespace fs = std::filesystem;

namespace {

using clock_type = std::chrono::steady_clock;

double since(clock_type::time_point t0) { return std::chrono::duration<double>(clock_type::now() - t0).count(); }

struct Line {
  int id;
  bool pass;
  std::string detail;
};

std::vector<Line> lines;

void report(int id, bool pass, const std::string& detail) {
  lines.push_back({id, pass, detail});
  std::printf("criterion %d: %s | %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

bool manifest_ok(const fs::path& dir, std::string& detail) {
  const std::string m = verify_manifest(dir);
  if (!m.empty()) detail += "; manifest: " + m;
  return m.empty();
}

void criterion_elastic(const fs::path& root) {
  RunConfig c = preset("elastic");
  c.output.timings = false;
  const auto t0 = clock_type::now();
  const RunOutcome r = cmd_compare(c, (root / "c1").string());
  const double sec = since(t0);
  const double iters = r.metrics.at("latin_iterations");
  const double xi = r.metrics.at("latin_xi");
  const double err = r.metrics.at("compare_error_percent");
  const double dmax = r.metrics.at("nnr_max_damage");
  std::string d = "iterations " + fmt("%.0f", iters) + ", xi " + fmt("%.2e", xi) + ", eps " + fmt("%.2e", err) +
                  " %, NNR max d " + fmt("%.1g", dmax) + ", " + fmt("%.2f", sec) + " s";
  const bool ok = r.converged && iters == 1 && xi < 1e-6 && err < 0.1 && dmax == 0 && sec < 30;
  report(1, manifest_ok(root / "c1", d) && ok, d);
}

struct MonoResult {
  int modes = 0;
  double err = 0;
  bool ran = false;
  RunOutcome outcome;
};

MonoResult criterion_mono(const fs::path& root) {
  RunConfig c = preset("mono_sine");
  c.output.timings = false;
  c.solver.compress_tol = 0.01;
  const auto t0 = clock_type::now();
  MonoResult m;
  m.outcome = cmd_compare(c, (root / "c2").string());
  const double sec = since(t0);
  const RunOutcome& r = m.outcome;
  m.ran = true;
  m.modes = static_cast<int>(r.metrics.at("latin_modes"));
  m.err = r.metrics.at("compare_error_percent");
  const double gap = r.metrics.at("damage_gap_relative");
  const bool a = r.converged && m.modes <= 100;
  const bool b = m.err < 3.0;
  const bool cc = gap < 0.02;
  std::string d = std::string("(a) ") + (a ? "pass" : "fail") + " " + std::to_string(m.modes) + " modes" +
                  (r.converged ? "" : " not converged") + "; (b) " + (b ? "pass" : "fail") + " eps " +
                  fmt("%.2f", m.err) + " %; (c) " + (cc ? "pass" : "fail") + " max d LATIN " +
                  fmt("%.4f", r.metrics.at("latin_max_damage")) + " vs NNR " + fmt("%.4f", r.metrics.at("nnr_max_damage")) +
                  " (gap " + fmt("%.2f", 100 * gap) + " %); " + fmt("%.0f", sec) + " s";
  report(2, manifest_ok(root / "c2", d) && a && b && cc && sec < 600, d);
  return m;
}

void criterion_multi(const fs::path& root, const MonoResult& mono) {
  RunConfig c = preset("multi_sine");
  c.output.timings = false;
  const auto t0 = clock_type::now();
  const RunOutcome r = cmd_compare(c, (root / "c3").string());
  const double sec = since(t0);
  const int modes = static_cast<int>(r.metrics.at("latin_modes"));
  const double err = r.metrics.at("compare_error_percent");
  const bool fewer = r.converged && modes < mono.modes;
  std::string d = std::to_string(modes) + " modes vs " + std::to_string(mono.modes) + " (" + (fewer ? "pass" : "fail") +
                  (r.converged ? "" : ", not converged") + "); eps " + fmt("%.2f", err) + " % (" +
                  (err < 3 ? "pass" : "fail") + "); max d NNR " + fmt("%.4f", r.metrics.at("nnr_max_damage")) + "; " +
                  fmt("%.0f", sec) + " s";
  report(3, manifest_ok(root / "c3", d) && fewer && err < 3 && sec < 600, d);
}

void criterion_modal(const fs::path& root) {
  RunConfig c = preset("beam_modal");
  c.output.timings = false;
  const auto t0 = clock_type::now();
  const RunOutcome r = cmd_modal(c, (root / "c4").string());
  const double sec = since(t0);
  const double f1 = r.metrics.at("f1_hz");
  const double e_ref = std::abs(f1 - 8.99) / 8.99, e_beam = std::abs(f1 - 8.2) / 8.2;
  std::string d = "mesh " + std::to_string(c.mesh.nx) + "x" + std::to_string(c.mesh.ny) + "x" +
                  std::to_string(c.mesh.nz) + ", f1 " + fmt("%.3f", f1) + " Hz, " + fmt("%.1f", 100 * e_ref) +
                  " % from 8.99, " + fmt("%.1f", 100 * e_beam) + " % from 8.2; " + fmt("%.1f", sec) + " s";
  report(4, manifest_ok(root / "c4", d) && e_ref < 0.15 && e_beam < 0.10 && sec < 120, d);
}

void criterion_tdg() {
  const auto t0 = clock_type::now();
  const double big_w = 2 * M_PI, w = 2 * M_PI * 1.7;
  const TimeGrid g(2.0, 80);  // 40 elements per forcing period
  const Eigen::VectorXd f = g.gauss_times().unaryExpr([&](double t) { return std::sin(big_w * t); });
  const TimeFunction x = tdgm_march(g, 1.0, 0.0, w * w, f);
  auto exact = [&](double t) { return (std::sin(big_w * t) - big_w / w * std::sin(w * t)) / (w * w - big_w * big_w); };
  const Eigen::VectorXd tq = g.gauss_times(), wq = g.gauss_weights(), xq = x.at_gauss();
  double e2 = 0, n2 = 0, peak = 0;
  for (int q = 0; q < tq.size(); ++q) {
    e2 += wq(q) * std::pow(xq(q) - exact(tq(q)), 2);
    n2 += wq(q) * std::pow(exact(tq(q)), 2);
  }
  for (int i = 0; i <= 4000; ++i) peak = std::max(peak, std::abs(exact(2.0 * i / 4000)));
  const double err = std::sqrt(e2 / n2), jump = x.max_jump() / peak;
  const double sec = since(t0);
  report(5, err < 0.01 && jump < 1e-3 && sec < 5,
         "L2 error " + fmt("%.2e", err) + ", max jump/peak " + fmt("%.2e", jump) + ", " + fmt("%.3f", sec) + " s");
}

void criterion_material() {
  const auto t0 = clock_type::now();
  const MaterialParams p;
  const Hooke c = p.hooke();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> amp(0, 8e-4), comp(-1, 1), dt(1e-3, 2e-2), freq(0.5, 20);
  int bad_bounds = 0, bad_mono = 0, bad_rate = 0, bad_f = 0, bad_secant = 0, compress_checks = 0;
  double worst_f = 0, worst_secant = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    PointHistory h;
    Vector6 dir;
    for (int k = 0; k < 6; ++k) dir(k) = comp(rng);
    const double a = amp(rng), om = 2 * M_PI * freq(rng);
    double t = 0, d_prev = 0;
    for (int k = 0; k < 100; ++k) {
      const double step = dt(rng);
      t += step;
      const double zz_prev = h.zz;
      const PointSample s = advance_point(h, a * std::sin(om * t) * dir, t, p, c);
      if (!(s.d >= 0 && s.d < 1)) ++bad_bounds;
      if (s.d < d_prev) ++bad_mono;
      if ((s.d - d_prev) / step > 1 / p.tau_c + 1e-9) ++bad_rate;
      if (s.zz > zz_prev) {  // threshold moved: consistency f = 0
        const double f = std::abs(s.y - (p.y0 + s.zz)) / s.y;
        worst_f = std::max(worst_f, f);
        if (f > 1e-9) ++bad_f;
      }
      d_prev = s.d;
    }
    if (h.tr_eps_max > kClosureGuard && h.d > 0) {
      Vector6 e = Vector6::Zero();
      e(0) = -3 * h.tr_eps_max;
      const Vector6 s = point_stress(e, h, p, c);
      const double secant = s.dot(e) / e.dot(c.stiffness() * e);
      worst_secant = std::max(worst_secant, std::abs(secant - 1));
      if (std::abs(secant - 1) > 0.01) ++bad_secant;
      ++compress_checks;
    }
  }
  const double sec = since(t0);
  const bool ok = !bad_bounds && !bad_mono && !bad_rate && !bad_f && !bad_secant && compress_checks > 100 && sec < 60;
  report(6, ok,
         "1000 histories: bounds " + std::to_string(bad_bounds) + ", monotonicity " + std::to_string(bad_mono) +
             ", rate " + std::to_string(bad_rate) + " violations; max |f|/Y " + fmt("%.1e", worst_f) +
             "; compression secant max dev " + fmt("%.1e", worst_secant) + " over " + std::to_string(compress_checks) +
             " damaged points; " + fmt("%.2f", sec) + " s");
}

void criterion_pgd() {
  const auto t0 = clock_type::now();
  const MaterialParams p;
  const SpatialSystem sys(generate_box_mesh(8, 0.3, 0.3, 16, 2, 2, SupportKind::midline), p.rho, p.hooke());
  const TimeGrid grid(2.0, 100);
  const GlobalContext ctx(sys, grid);
  Eigen::VectorXd uf(sys.num_free());
  for (int i = 0; i < sys.num_free(); ++i) uf(i) = 1e-5 * std::sin(0.37 * i) + 2e-6 * std::cos(1.3 * i);
  const Eigen::VectorXd s_bar = apply_pointwise(sys.hooke().stiffness(), sys.strain_op() * sys.expand_free(uf));
  const Eigen::VectorXd g = grid.gauss_times().unaryExpr([](double t) { return std::sin(2 * M_PI * 3 * t) * (1 + t); });
  const FieldST delta = s_bar * g.transpose();
  const double before = st_compliance_energy(delta, sys.hooke(), ctx.quad);
  const EnrichResult r = enrich(delta, ctx, 1);
  const double ratio = before / mode_cre(delta, r.mode, ctx);

  const PgdMode& m = r.mode;
  const TimeFunction mu = time_mu(m.sigma, m.eps, m.lambda, delta, ctx);
  const int nd = grid.num_dofs(), nq = grid.num_gauss();
  Eigen::MatrixXd n = Eigen::MatrixXd::Zero(nq, nd);
  for (int e = 0; e < grid.num_elements(); ++e) n.block<4, 4>(4 * e, 4 * e) = grid.gauss_shape(0);
  const Eigen::VectorXd& ws = ctx.quad.space;
  const Eigen::VectorXd cs = apply_pointwise(sys.hooke().compliance(), m.sigma);
  const Eigen::VectorXd lam = m.lambda.at_gauss();
  Eigen::VectorXd rhs(nq);
  for (int q = 0; q < nq; ++q) rhs(q) = space_dot(m.sigma, m.eps, ws) * lam(q) - space_dot(cs, delta.col(q), ws);
  const Eigen::MatrixXd a = space_dot(cs, m.sigma, ws) * n.transpose() * ctx.quad.time.asDiagonal() * n;
  const Eigen::VectorXd oracle = a.ldlt().solve(n.transpose() * ctx.quad.time.asDiagonal() * rhs);
  const double mu_err = (mu.coefficients() - oracle).norm() / oracle.norm();
  const double sec = since(t0);
  report(7, r.status == EnrichStatus::enriched && ratio >= 1e3 && mu_err <= 1e-8 && sec < 60,
         "CRE reduction " + fmt("%.2e", ratio) + "x, mu vs dense oracle " + fmt("%.1e", mu_err) + ", " +
             fmt("%.2f", sec) + " s");
}

void criterion_compression(const MonoResult& mono) {
  const RunOutcome& r = mono.outcome;
  if (!mono.ran || !r.metrics.count("compressed_kinematic_rank")) {
    report(8, false, "criterion-2 solution unavailable");
    return;
  }
  const int rank = static_cast<int>(std::max(r.metrics.at("compressed_kinematic_rank"), r.metrics.at("compressed_stress_rank")));
  const int bound = (mono.modes + 2) / 3;
  const double degr = r.metrics.at("compressed_compare_error_percent") - mono.err;
  report(8, rank <= bound && degr < 0.5,
         std::to_string(mono.modes) + " modes -> rank " + std::to_string(rank) + " (bound " + std::to_string(bound) +
             "), eps " + fmt("%.3f", mono.err) + " % -> " + fmt("%.3f", r.metrics.at("compressed_compare_error_percent")) +
             " % (change " + fmt("%+.3f", degr) + " pp)");
}

void criterion_determinism(const fs::path& root) {
  RunConfig c = preset("mono_sine");
  c.solver.n_t = 100;
  c.solver.mode_cap = 15;
  c.output.timings = false;
  c.output.vtk = true;
  c.solver.seed = 7;
  const fs::path a = root / "c9a", b = root / "c9b";
  const RunOutcome ra = cmd_compare(c, a.string());
  const RunOutcome rb = cmd_compare(c, b.string());
  int differing = 0;
  for (const auto& f : ra.files)
    if (slurp(a / f) != slurp(b / f)) ++differing;
  std::string d = std::to_string(ra.files.size()) + " files compared, " + std::to_string(differing) + " differ";
  const bool ok = differing == 0 && ra.files == rb.files && ra.files.size() > 5;
  report(9, manifest_ok(a, d) && manifest_ok(b, d) && ok, d);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  std::string out = "acceptance_out";
  std::vector<int> only;
  app.add_option("--out-dir", out, "Directory for run outputs");
  app.add_option("--only", only, "Run a subset of criteria");
  CLI11_PARSE(app, argc, argv);
#ifdef _OPENMP
  omp_set_dynamic(0);
  omp_set_num_threads(1);
#endif
  const fs::path root(out);
  fs::create_directories(root);
  auto want = [&](int id) { return only.empty() || std::find(only.begin(), only.end(), id) != only.end(); };

  try {
    if (want(1)) criterion_elastic(root);
    MonoResult mono;
    if (want(2) || want(3) || want(8)) mono = criterion_mono(root);
    if (want(3)) criterion_multi(root, mono);
    if (want(4)) criterion_modal(root);
    if (want(5)) criterion_tdg();
    if (want(6)) criterion_material();
    if (want(7)) criterion_pgd();
    if (want(8)) criterion_compression(mono);
    if (want(9)) criterion_determinism(root);
  } catch (const std::exception& e) {
    std::printf("aborted: %s\n", e.what());
    return 2;
  }
  int failed = 0;
  for (const auto& l : lines) failed += !l.pass;
  std::printf("%zu criteria run, %d failed\n", lines.size(), failed);
  return failed ? 1 : 0;
}

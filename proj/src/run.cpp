#include "latinpgd/run.hpp"

#include "latinpgd/io.hpp"
#include "latinpgd/latin.hpp"
#include "latinpgd/newmark.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace latinpgd {

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct Problem {
  SpatialSystem system;
  LoadCase load;
  TimeGrid grid;

  explicit Problem(const RunConfig& c)
      : system(build_mesh(c.mesh), c.material.rho, c.material.hooke(), build_damping(c)),
        load(build_load(c)),
        grid(c.load.horizon, c.solver.n_t) {}
};

LatinParams latin_params(const RunConfig& c) {
  LatinParams lp;
  lp.xi_stop = c.solver.xi_stop;
  lp.mode_cap = c.solver.mode_cap;
  lp.omega = c.solver.omega;
  lp.enrich.zeta_stop = c.solver.zeta_stop;
  lp.enrich.max_iterations = c.solver.fixed_point_max;
  lp.seed = c.solver.seed;
  lp.scheme = c.solver.scheme;
  lp.elastic = build_nnr(c);
  return lp;
}

double stress_norm(const Eigen::Ref<const Vector6>& s) {
  return std::sqrt(s.head<3>().squaredNorm() + 2 * s.tail<3>().squaredNorm());
}

int nearest(const Eigen::VectorXd& times, double t) {
  Eigen::Index k = 0;
  (times.array() - t).abs().minCoeff(&k);
  return static_cast<int>(k);
}

void write_snapshot(OutputDir& out, const std::string& name, const Mesh& mesh, const Eigen::VectorXd& u,
                    const Eigen::VectorXd& sigma, const Eigen::VectorXd& d, double t) {
  Eigen::VectorXd sn(mesh.num_gauss());
  for (int g = 0; g < mesh.num_gauss(); ++g) sn(g) = stress_norm(sigma.segment<6>(6 * g));
  const std::map<std::string, Eigen::VectorXd> cells{{"damage", element_average(mesh, d)},
                                                      {"stress_norm", element_average(mesh, sn)}};
  out.write(name, vtk_snapshot(mesh, u, cells, "latinpgd " + name + " t=" + format_number(t)), "vtk-legacy-2.0");
}

void finish(OutputDir& out, const RunConfig& c, const std::string& command, RunOutcome& r) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["converged"] = r.converged;
  for (const auto& [k, v] : r.metrics) j["metrics"][k] = v;
  out.write("summary.json", j.dump(2) + "\n", "summary-v1");
  const std::string text = to_text(c);
  out.write_manifest({{"version", kVersion},
                      {"command", command},
                      {"config", c.name},
                      {"config_sha256", sha256_hex(text)},
                      {"seed", std::to_string(c.solver.seed)}});
  r.files = out.files();
  r.files.push_back("manifest.json");
}

void write_config(OutputDir& out, const RunConfig& c) { out.write("config.txt", to_text(c), "config-v1"); }

struct LatinRun {
  LatinResult result;
  double seconds = 0;
};

LatinRun latin_outputs(const RunConfig& c, const Problem& pb, OutputDir& out, RunOutcome& r, int monitored) {
  LatinRun run;
  const auto t0 = clock_type::now();
  run.result = run_latin(pb.system, c.material, pb.load, pb.grid, latin_params(c));
  run.seconds = seconds_since(t0);
  const LatinResult& res = run.result;

  CsvTable log({"iteration", "modes", "xi", "cre", "wall_seconds", "fixed_point_iterations"});
  for (const auto& e : res.log)
    log.add_row({double(e.iteration), double(e.modes), e.xi, e.cre, c.output.timings ? e.wall_seconds : 0.0,
                 double(e.fixed_point_iterations)});
  out.write("latin_convergence.csv", log.str(), "latin-convergence-v1");

  CsvTable modes({"mode", "norm_constant", "zeta"});
  for (std::size_t i = 0; i < res.norm_constants.size(); ++i)
    modes.add_row({double(i + 1), res.norm_constants[i], res.zeta[i]});
  out.write("latin_modes.csv", modes.str(), "latin-modes-v1");

  const int g = monitored >= 0 ? monitored : monitored_point(res.local.d);
  const Eigen::VectorXd times = pb.grid.gauss_times();
  CsvTable dam({"t", "d", "dbar", "y"});
  for (int k = 0; k < times.size(); ++k) dam.add_row({times(k), res.local.d(g, k), res.local.dbar(g, k), res.local.y(g, k)});
  out.write("latin_damage.csv", dam.str(), "damage-series-latin-v1");

  if (c.output.vtk && !c.output.snapshots.empty()) {
    const Reconstruction rec = reconstruct(res.solution, pb.grid);
    for (std::size_t i = 0; i < c.output.snapshots.size(); ++i) {
      const int k = nearest(times, c.output.snapshots[i]);
      write_snapshot(out, "latin_snapshot_" + std::to_string(i) + ".vtk", pb.system.mesh(), rec.u.col(k),
                     rec.sigma.col(k), res.local.d.col(k), times(k));
    }
  }

  r.converged = res.converged;
  r.metrics["latin_converged"] = res.converged ? 1 : 0;
  r.metrics["latin_iterations"] = static_cast<double>(res.log.size());
  r.metrics["latin_modes"] = res.solution.num_modes();
  r.metrics["latin_xi"] = res.log.empty() ? 0.0 : res.log.back().xi;
  r.metrics["latin_max_damage"] = res.local.d.row(g).maxCoeff();
  r.metrics["latin_monitored_point"] = g;
  r.metrics["latin_space_analyses"] = res.space_analyses;
  if (c.output.timings) r.metrics["latin_seconds"] = run.seconds;
  return run;
}

struct NnrRun {
  NnrResult result;
  double seconds = 0;
  int monitored = 0;
};

NnrRun nnr_outputs(const RunConfig& c, const Problem& pb, OutputDir& out, RunOutcome& r) {
  NnrRun run;
  const auto t0 = clock_type::now();
  run.result = newmark_quasi_newton(pb.system, c.material, pb.load, build_nnr(c));
  run.seconds = seconds_since(t0);
  const NnrResult& n = run.result;
  run.monitored = monitored_point(n.d);
  const int g = run.monitored;

  CsvTable dam({"t", "d"});
  for (int k = 0; k < n.times.size(); ++k) dam.add_row({n.times(k), n.d(g, k)});
  out.write("nnr_damage.csv", dam.str(), "damage-series-nnr-v1");

  CsvTable it({"step", "t", "iterations"});
  for (std::size_t k = 0; k < n.iterations.size(); ++k)
    it.add_row({double(k + 1), n.times(static_cast<Eigen::Index>(k) + 1), double(n.iterations[k])});
  out.write("nnr_iterations.csv", it.str(), "nnr-iterations-v1");

  if (c.output.vtk && !c.output.snapshots.empty()) {
    for (std::size_t i = 0; i < c.output.snapshots.size(); ++i) {
      const int k = nearest(n.times, c.output.snapshots[i]);
      write_snapshot(out, "nnr_snapshot_" + std::to_string(i) + ".vtk", pb.system.mesh(), n.u.col(k), n.sigma.col(k),
                     n.d.col(k), n.times(k));
    }
  }

  int total = 0;
  for (int v : n.iterations) total += v;
  r.metrics["nnr_max_damage"] = n.d.row(g).maxCoeff();
  r.metrics["nnr_monitored_point"] = g;
  r.metrics["nnr_iterations"] = total;
  r.metrics["nnr_factorizations"] = n.factorizations;
  if (c.output.timings) r.metrics["nnr_seconds"] = run.seconds;
  return run;
}

}  // namespace

RunOutcome cmd_run_latin(const RunConfig& c, const std::string& out_dir) {
  const Problem pb(c);
  OutputDir out(out_dir);
  write_config(out, c);
  RunOutcome r;
  latin_outputs(c, pb, out, r, -1);
  finish(out, c, "run-latin", r);
  return r;
}

RunOutcome cmd_run_newmark(const RunConfig& c, const std::string& out_dir) {
  const Problem pb(c);
  OutputDir out(out_dir);
  write_config(out, c);
  RunOutcome r;
  nnr_outputs(c, pb, out, r);
  finish(out, c, "run-newmark", r);
  return r;
}

RunOutcome cmd_compare(const RunConfig& c, const std::string& out_dir) {
  const Problem pb(c);
  OutputDir out(out_dir);
  write_config(out, c);
  RunOutcome r;
  const NnrRun nnr = nnr_outputs(c, pb, out, r);
  const LatinRun lat = latin_outputs(c, pb, out, r, nnr.monitored);

  const GlobalContext ctx(pb.system, pb.grid, c.solver.scheme);
  const SparseMatrix pt = SparseMatrix(nnr_to_gauss(pb.grid).transpose());
  const FieldST sigma_ref = nnr.result.sigma * pt;
  const FieldST eps_ref = nnr.result.eps * pt;
  const Reconstruction rec = reconstruct(lat.result.solution, pb.grid);
  const double err = compare_error(sigma_ref, eps_ref, rec.sigma, rec.eps, ctx.quad);
  const double dn = r.metrics["nnr_max_damage"];
  const double dl = r.metrics["latin_max_damage"];
  r.metrics["compare_error_percent"] = err;
  r.metrics["damage_gap_relative"] = dn > 0 ? std::abs(dl - dn) / dn : std::abs(dl - dn);

  CsvTable cmp({"modes", "compare_error_percent", "nnr_max_damage", "latin_max_damage"});
  cmp.add_row({double(lat.result.solution.num_modes()), err, dn, dl});
  if (c.solver.compress_tol > 0 && lat.result.solution.num_modes() > 0) {
    PgdSolution compressed = lat.result.solution;
    const CompressionReport rep = compress_basis(compressed, ctx, c.solver.compress_tol);
    const Reconstruction rc = reconstruct(compressed, pb.grid);
    const double err_c = compare_error(sigma_ref, eps_ref, rc.sigma, rc.eps, ctx.quad);
    r.metrics["compressed_kinematic_rank"] = rep.kinematic_rank;
    r.metrics["compressed_stress_rank"] = rep.stress_rank;
    r.metrics["compressed_compare_error_percent"] = err_c;
    cmp.add_row({double(std::max(rep.kinematic_rank, rep.stress_rank)), err_c, dn, dl});
  }
  out.write("compare.csv", cmp.str(), "compare-v1");
  finish(out, c, "compare", r);
  return r;
}

RunOutcome cmd_matpoint(const RunConfig& c, const std::string& out_dir) {
  OutputDir out(out_dir);
  write_config(out, c);
  const MatpointConfig& m = c.matpoint;
  const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(m.samples, 0.0, m.duration);
  const double w = 2 * M_PI * m.frequency;
  const Eigen::VectorXd eps = (m.amplitude / m.duration) * (t.array() * (w * t.array()).sin()).matrix();
  const MatpointSeries s = matpoint_drive(t, eps, c.material);
  CsvTable tab({"t", "eps_x", "sigma_x", "d", "dbar", "y"});
  for (int k = 0; k < t.size(); ++k) tab.add_row({s.t(k), s.eps_x(k), s.sigma_x(k), s.d(k), s.dbar(k), s.y(k)});
  out.write("matpoint.csv", tab.str(), "matpoint-v1");
  RunOutcome r;
  r.metrics["max_damage"] = s.d.maxCoeff();
  finish(out, c, "matpoint", r);
  return r;
}

RunOutcome cmd_modal(const RunConfig& c, const std::string& out_dir) {
  OutputDir out(out_dir);
  write_config(out, c);
  const auto t0 = clock_type::now();
  const SpatialSystem sys(build_mesh(c.mesh), c.material.rho, c.material.hooke());
  const ModalResult modes = modal_analysis(sys.mass_ff(), sys.stiffness_ff(), c.solver.modal_modes);
  CsvTable tab({"mode", "frequency_hz"});
  for (int i = 0; i < modes.frequencies.size(); ++i) tab.add_row({double(i + 1), modes.frequencies(i)});
  out.write("modal.csv", tab.str(), "modal-v1");
  RunOutcome r;
  r.metrics["f1_hz"] = modes.frequencies(0);
  r.metrics["free_dofs"] = sys.num_free();
  if (c.output.timings) r.metrics["modal_seconds"] = seconds_since(t0);
  finish(out, c, "modal", r);
  return r;
}

RunOutcome cmd_calibrate(const RunConfig& c, const std::string& out_dir, const CalibrateParams& params) {
  OutputDir out(out_dir);
  write_config(out, c);
  const SpatialSystem sys(build_mesh(c.mesh), c.material.rho, c.material.hooke(), build_damping(c));
  const NnrConfig nc = build_nnr(c);
  CsvTable tab({"scale", "max_amplitude", "max_damage"});
  int evaluations = 0;
  // Max damage at the monitored point for a scaled load; a failing run counts as overshoot.
  auto damage = [&](double scale) {
    LoadCase load = build_load(c);
    for (auto& s : load.sines) s.amplitude *= scale;
    double d = 1.0;
    try {
      const NnrResult n = newmark_quasi_newton(sys, c.material, load, nc);
      d = n.d.row(monitored_point(n.d)).maxCoeff();
    } catch (const std::runtime_error&) {
    }
    ++evaluations;
    tab.add_row({scale, scale * c.max_amplitude(), d});
    return d;
  };

  double lo = 0, hi = 0, d_lo = 0, d_hi = 1;
  double s = 1.0;
  double d = damage(s);
  if (d < params.target) {
    lo = s, d_lo = d;
    while (evaluations < params.max_evaluations) {
      s *= 1.25;
      d = damage(s);
      if (d >= params.target) { hi = s, d_hi = d; break; }
      lo = s, d_lo = d;
    }
  } else {
    hi = s, d_hi = d;
    while (evaluations < params.max_evaluations) {
      s /= 1.25;
      d = damage(s);
      if (d < params.target) { lo = s, d_lo = d; break; }
      hi = s, d_hi = d;
    }
  }
  RunOutcome r;
  r.converged = false;
  double best = std::abs(d_lo - params.target) < std::abs(d_hi - params.target) ? lo : hi;
  double best_d = best == lo ? d_lo : d_hi;
  if (hi > 0 && lo > 0) {
    while (evaluations < params.max_evaluations && std::abs(best_d - params.target) > params.tolerance) {
      const double mid = 0.5 * (lo + hi);
      const double dm = damage(mid);
      if (dm < params.target) lo = mid, d_lo = dm;
      else hi = mid, d_hi = dm;
      best = std::abs(d_lo - params.target) < std::abs(d_hi - params.target) ? lo : hi;
      best_d = best == lo ? d_lo : d_hi;
    }
  }
  r.converged = std::abs(best_d - params.target) <= params.tolerance;
  out.write("calibrate.csv", tab.str(), "calibrate-v1");
  r.metrics["scale"] = best;
  r.metrics["max_damage"] = best_d;
  r.metrics["evaluations"] = evaluations;
  for (std::size_t i = 0; i < c.load.sines.size(); ++i)
    r.metrics["amplitude_" + std::to_string(i + 1)] = best * c.load.sines[i].amplitude;
  finish(out, c, "calibrate", r);
  return r;
}

}  // namespace latinpgd

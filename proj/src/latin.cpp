#include "latinpgd/latin.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace latinpgd {

PgdSolution elastic_solution(const SpatialSystem& system, const LoadCase& load, const TimeGrid& grid,
                             const NnrConfig& config) {
  NnrConfig cfg = config;
  cfg.horizon = grid.horizon();
  cfg.steps = 2 * grid.num_elements();
  LinearStress model(system.hooke());
  const NnrResult nnr = newmark_integrate(system, model, load, cfg);
  const SparseMatrix p = nnr_to_gauss(grid);
  const SparseMatrix pt = p.transpose();
  PgdSolution sol;
  sol.u_el = nnr.u * pt;
  sol.eps_el = nnr.eps * pt;
  sol.sigma_el = nnr.sigma * pt;
  return sol;
}

double latin_error(const FieldST& sigma, const FieldST& sigma_hat, const FieldST& eps, const FieldST& eps_hat,
                   const SpaceTimeQuadrature& q) {
  const double ns = st_norm2(sigma, Flavor::stress, q);
  const double ne = st_norm2(eps, Flavor::strain, q);
  if (!(ns > 0) || !(ne > 0)) throw std::runtime_error("latin_error: degenerate (all-zero) global solution");
  const double ds = st_norm2(sigma - sigma_hat, Flavor::stress, q);
  const double de = st_norm2(eps - eps_hat, Flavor::strain, q);
  return std::sqrt(ds / ns + de / ne);
}

int monitored_point(const Eigen::MatrixXd& damage) {
  if (damage.size() == 0) throw std::invalid_argument("monitored_point: empty damage field");
  Eigen::Index g = 0;
  damage.rowwise().maxCoeff().maxCoeff(&g);
  return static_cast<int>(g);
}

LatinResult run_latin(const SpatialSystem& system, const MaterialParams& p, const LoadCase& load,
                      const TimeGrid& grid, const LatinParams& params) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  if (!(params.xi_stop > 0)) throw std::invalid_argument("run_latin: xi_stop must be positive");
  if (params.mode_cap < 0) throw std::invalid_argument("run_latin: mode cap must be non-negative");

  LatinResult res;
  res.solution = elastic_solution(system, load, grid, params.elastic);
  const GlobalContext ctx(system, grid, params.scheme);
  SpaceSolver solver(system);
  std::mt19937_64 rng(params.seed);
  const Eigen::VectorXd times = grid.gauss_times();

  FieldST eps = res.solution.eps_el;
  FieldST sigma = res.solution.sigma_el;
  for (int n = 1;; ++n) {
    res.local = local_stage(eps, times, p);
    const FieldST delta = compute_delta(sigma, res.local.sigma);
    const FieldST eps_hat = eps;
    IterationLog entry;
    entry.iteration = n;

    const bool room = res.solution.num_modes() < params.mode_cap;
    // A correction at round-off level of the stress carries no information.
    const bool negligible =
        st_norm2(delta, Flavor::stress, ctx.quad) <= 1e-24 * st_norm2(sigma, Flavor::stress, ctx.quad);
    if (room && !negligible) {
      EnrichResult er = enrich(delta, ctx, solver, rng, params.enrich);
      entry.fixed_point_iterations = er.iterations;
      if (er.status == EnrichStatus::enriched) {
        relax_mode(er.mode, params.omega);
        res.solution.add_mode(er.mode);
        eps.noalias() += er.mode.eps * er.mode.lambda.at_gauss().transpose();
        sigma.noalias() += er.mode.sigma * er.mode.mu.at_gauss().transpose();
        res.norm_constants.push_back(er.norm_constant.back());
        res.zeta.push_back(er.zeta.back());
      }
    }
    entry.modes = res.solution.num_modes();
    entry.xi = latin_error(sigma, res.local.sigma, eps, eps_hat, ctx.quad);
    FieldST x = sigma - res.local.sigma;
    x -= apply_pointwise(system.hooke().stiffness(), eps - eps_hat);
    entry.cre = st_compliance_energy(x, system.hooke(), ctx.quad);
    entry.wall_seconds = std::chrono::duration<double>(clock::now() - start).count();
    res.log.push_back(entry);
    if (entry.xi <= params.xi_stop) {
      res.converged = true;
      break;
    }
    if (!room || negligible) break;
  }
  res.space_analyses = solver.analyses();
  return res;
}

}  // namespace latinpgd

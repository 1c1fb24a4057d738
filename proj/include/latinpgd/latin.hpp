// LATIN iteration: elastic start, local stage, PGD global stage, error.
#pragma once

#include "latinpgd/local_stage.hpp"
#include "latinpgd/newmark.hpp"
#include "latinpgd/pgd.hpp"

#include <cstdint>
#include <vector>

namespace latinpgd {

struct LatinParams {
  double xi_stop = 5e-4;
  int mode_cap = 150;
  double omega = 0.4;
  EnrichParams enrich;
  std::uint64_t seed = 1;
  TdgScheme scheme = TdgScheme::jump;
  NnrConfig elastic;  // integrator settings of the elastic solution (steps = 2 N_T)
};

/// Undamaged dynamics with the prescribed support motion, integrated by the
/// reference Newmark scheme on the 2 N_T + 1 grid and transferred to the
/// temporal Gauss points. Returned as a solution without modes.
PgdSolution elastic_solution(const SpatialSystem& system, const LoadCase& load, const TimeGrid& grid,
                             const NnrConfig& config);

/// sqrt(|s - s_hat|^2 / |s|^2 + |e - e_hat|^2 / |e|^2), unweighted space-time L2.
double latin_error(const FieldST& sigma, const FieldST& sigma_hat, const FieldST& eps, const FieldST& eps_hat,
                   const SpaceTimeQuadrature& q);

struct IterationLog {
  int iteration = 0;
  int modes = 0;
  double xi = 0;
  double cre = 0;
  double wall_seconds = 0;
  int fixed_point_iterations = 0;
};

struct LatinResult {
  PgdSolution solution;
  LocalFields local;  // last local stage (damage field of the converged state)
  std::vector<IterationLog> log;
  std::vector<double> norm_constants;  // c_c of each added mode
  std::vector<double> zeta;            // final stagnation of each added mode
  bool converged = false;
  int space_analyses = 0;
};

LatinResult run_latin(const SpatialSystem& system, const MaterialParams& p, const LoadCase& load,
                      const TimeGrid& grid, const LatinParams& params);

/// Spatial Gauss point with the largest max_t d.
int monitored_point(const Eigen::MatrixXd& damage);

}  // namespace latinpgd

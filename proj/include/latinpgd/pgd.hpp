// LATIN global stage: PGD enrichment of space-time corrections, relaxation,
// compression and reconstruction.
#pragma once

#include "latinpgd/fem.hpp"
#include "latinpgd/field.hpp"
#include "latinpgd/time_grid.hpp"

#include <Eigen/SparseCholesky>

#include <random>
#include <vector>

namespace latinpgd {

/// Operators shared by every enrichment of a run.
struct GlobalContext {
  const SpatialSystem* system = nullptr;
  TimeGrid grid;
  SpaceTimeQuadrature quad;
  TdgScheme scheme = TdgScheme::jump;

  GlobalContext(const SpatialSystem& sys, const TimeGrid& g, TdgScheme s = TdgScheme::jump);
  const Hooke& hooke() const { return system->hooke(); }
};

struct PgdMode {
  Eigen::VectorXd u;      // nodal displacement, all dofs (zero on prescribed)
  Eigen::VectorXd eps;    // 6 n_gauss strain (engineering shear)
  Eigen::VectorXd sigma;  // 6 n_gauss stress
  TimeFunction lambda;    // kinematic time function
  TimeFunction mu;        // stress time function

  explicit PgdMode(const TimeGrid& grid) : lambda(grid), mu(grid) {}
};

/// Elastic fields plus the two separated families of corrections:
/// u = u_el + U Lambda^T, eps = eps_el + Ebar Lambda^T, sigma = sigma_el + Sbar Mu^T.
struct PgdSolution {
  Eigen::MatrixXd u_el;  // n_dofs x n_time
  FieldST eps_el;        // 6 n_gauss x n_time
  FieldST sigma_el;      // 6 n_gauss x n_time

  Eigen::MatrixXd u_modes;      // n_dofs x m
  Eigen::MatrixXd eps_modes;    // 6 n_gauss x m
  Eigen::MatrixXd lambda;       // 4 N_T x m (nodal coefficients)
  Eigen::MatrixXd sigma_modes;  // 6 n_gauss x m_s
  Eigen::MatrixXd mu;           // 4 N_T x m_s

  int num_modes() const { return static_cast<int>(eps_modes.cols()); }
  int num_stress_modes() const { return static_cast<int>(sigma_modes.cols()); }
  void add_mode(const PgdMode& mode);
};

struct Reconstruction {
  Eigen::MatrixXd u;  // n_dofs x n_time
  FieldST eps;
  FieldST sigma;
};

Reconstruction reconstruct(const PgdSolution& sol, const TimeGrid& grid);

FieldST compute_delta(const FieldST& sigma, const FieldST& sigma_hat);

/// Sparse factorization of a M + c C + b K on the free dofs. The sparsity
/// pattern is analysed once; only numeric refactorizations follow.
class SpaceSolver {
 public:
  explicit SpaceSolver(const SpatialSystem& system);
  /// Solves (s_dd M + s_d C + s_0 K) u = rhs on the free dofs.
  Eigen::VectorXd solve(double s_dd, double s_d, double s_0, const Eigen::VectorXd& rhs_free);
  int analyses() const { return analyses_; }
  int factorizations() const { return factorizations_; }
  /// Relative residual of the last solve.
  double last_residual() const { return last_residual_; }

 private:
  const SpatialSystem& system_;
  SparseMatrix pattern_;
  Eigen::SimplicialLDLT<SparseMatrix> ldlt_;
  int analyses_ = 0;
  int factorizations_ = 0;
  double last_residual_ = 0;
};

struct SpaceResult {
  Eigen::VectorXd u;    // all dofs
  Eigen::VectorXd eps;  // 6 n_gauss
};

/// Free-dof nodal loading B_f^T W delta at every temporal Gauss point (n_free x n_time).
Eigen::MatrixXd nodal_load(const FieldST& delta, const GlobalContext& ctx);

SpaceResult space_problem(const TimeFunction& lambda, const FieldST& delta, const GlobalContext& ctx,
                          SpaceSolver& solver);
SpaceResult space_problem_nodal(const TimeFunction& lambda, const Eigen::MatrixXd& load, const GlobalContext& ctx,
                                SpaceSolver& solver);

Eigen::VectorXd stress_spatial(const Eigen::VectorXd& eps_bar, const TimeFunction& lambda, const TimeFunction& mu,
                               const FieldST& delta, const GlobalContext& ctx);

TimeFunction time_lambda(const Eigen::VectorXd& u_bar, const Eigen::VectorXd& eps_bar, const FieldST& delta,
                         const GlobalContext& ctx, MarchReport* report = nullptr);
TimeFunction time_lambda_nodal(const Eigen::VectorXd& u_bar, const Eigen::MatrixXd& load, const GlobalContext& ctx,
                               MarchReport* report = nullptr);

/// Pointwise-in-time minimizer of the constitutive relation error over mu,
/// fitted element by element.
TimeFunction time_mu(const Eigen::VectorXd& sigma_bar, const Eigen::VectorXd& eps_bar, const TimeFunction& lambda,
                     const FieldST& delta, const GlobalContext& ctx);

/// Scales the mode to unit strain norm; returns the normalization constant.
double normalize_mode(PgdMode& mode, const Eigen::VectorXd& w_space);

double stagnation(const TimeFunction& current, const TimeFunction& previous);

/// Space-time constitutive relation error of a correction (delta, mode):
/// integral of X:C^-1:X with X = delta + sigma_bar mu - C:eps_bar lambda.
double mode_cre(const FieldST& delta, const PgdMode& mode, const GlobalContext& ctx);

struct EnrichParams {
  double zeta_stop = 1e-2;
  int max_iterations = 5;
};

enum class EnrichStatus { enriched, no_enrichment };

struct EnrichResult {
  EnrichStatus status = EnrichStatus::no_enrichment;
  PgdMode mode;
  int iterations = 0;
  std::vector<double> zeta;
  std::vector<double> norm_constant;

  explicit EnrichResult(const TimeGrid& grid) : mode(grid) {}
};

EnrichResult enrich(const FieldST& delta, const GlobalContext& ctx, SpaceSolver& solver, std::mt19937_64& rng,
                    const EnrichParams& params = {});
/// Kinematic pair driven by a nodal loading, stress pair by delta.
EnrichResult enrich(const FieldST& delta, const Eigen::MatrixXd& load, const GlobalContext& ctx, SpaceSolver& solver,
                    std::mt19937_64& rng, const EnrichParams& params = {});
EnrichResult enrich(const FieldST& delta, const GlobalContext& ctx, std::uint64_t seed,
                    const EnrichParams& params = {});

void relax_mode(PgdMode& mode, double omega);

struct CompressionReport {
  int modes_before = 0;
  int kinematic_rank = 0;
  int stress_rank = 0;
  double kinematic_error = 0;  // relative, energy norm
  double stress_error = 0;     // relative, compliance norm
};

/// Truncated SVD of the separated representation. Keeps the smallest rank
/// whose discarded relative energy is at most tol (per family); max_rank > 0
/// caps the rank.
CompressionReport compress_basis(PgdSolution& sol, const GlobalContext& ctx, double tol, int max_rank = 0);

}  // namespace latinpgd

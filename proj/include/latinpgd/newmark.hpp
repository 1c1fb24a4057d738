// Incremental reference solver: Newmark average acceleration with
// quasi-Newton equilibrium iterations on a once-factorized effective matrix.
#pragma once

#include "latinpgd/fem.hpp"
#include "latinpgd/field.hpp"
#include "latinpgd/material.hpp"
#include "latinpgd/time_grid.hpp"

#include <vector>

namespace latinpgd {

struct SineComponent {
  double amplitude = 0;  // m
  double frequency = 0;  // Hz
};

/// Vertical support displacement g(t) = sum A_i sin(2 pi f_i t) applied to
/// the z dofs of every Dirichlet node; other prescribed dofs stay at zero.
struct LoadCase {
  std::vector<SineComponent> sines;

  double value(double t) const;
  double rate(double t) const;
  double accel(double t) const;
};

/// 1 on the prescribed z dofs, 0 on the other prescribed dofs.
Eigen::VectorXd support_pattern(const SpatialSystem& system);

/// Free-dof velocity at t = 0: at rest, or the static lift -K_ff^-1 K_fp g'(0)
/// of the support rate (a rigid translation for supports moving together).
enum class InitialVelocity { rest, quasi_static };

/// Velocity the Rayleigh damping acts on: absolute, or relative to the static
/// lift of the support motion (no damping of rigid support-following motion).
enum class DampingFrame { absolute, relative };

struct NnrConfig {
  double gamma = 0.5;
  double beta = 0.25;
  double tolerance = 1e-4;  // relative to the largest external force norm
  int max_iterations = 200;
  double horizon = 2.0;
  int steps = 200;  // number of increments; 2 N_T for the LATIN comparison
  InitialVelocity start = InitialVelocity::quasi_static;
  DampingFrame damping = DampingFrame::relative;
};

struct NnrResult {
  Eigen::VectorXd times;  // steps + 1
  Eigen::MatrixXd u, v, a;  // n_dofs x (steps + 1)
  FieldST eps, sigma;       // 6 n_gauss x (steps + 1)
  Eigen::MatrixXd d;        // n_gauss x (steps + 1)
  std::vector<int> iterations;  // equilibrium iterations per step
  int factorizations = 0;
  double force_reference = 0;
};

/// Pointwise stress update used by the integrator: evaluate() works from the
/// state at the start of the step, commit() accepts the last evaluation.
class StressModel {
 public:
  virtual ~StressModel() = default;
  virtual void evaluate(const Eigen::VectorXd& eps, double t, Eigen::VectorXd& sigma) = 0;
  virtual void commit() {}
  virtual void damage(Eigen::Ref<Eigen::VectorXd> d) const { d.setZero(); }
};

class LinearStress : public StressModel {
 public:
  explicit LinearStress(const Hooke& hooke) : hooke_(hooke) {}
  void evaluate(const Eigen::VectorXd& eps, double t, Eigen::VectorXd& sigma) override;

 private:
  Hooke hooke_;
};

class DamageStress : public StressModel {
 public:
  DamageStress(const MaterialParams& p, int n_gauss);
  void evaluate(const Eigen::VectorXd& eps, double t, Eigen::VectorXd& sigma) override;
  void commit() override { committed_ = trial_; }
  void damage(Eigen::Ref<Eigen::VectorXd> d) const override;

 private:
  MaterialParams p_;
  Hooke hooke_;
  std::vector<PointHistory> committed_, trial_;
};

NnrResult newmark_integrate(const SpatialSystem& system, StressModel& model, const LoadCase& load,
                            const NnrConfig& config);

/// Damaging run with the material law.
NnrResult newmark_quasi_newton(const SpatialSystem& system, const MaterialParams& p, const LoadCase& load,
                               const NnrConfig& config);

/// Cubic least-squares transfer from the 2 N_T + 1 node grid to the temporal
/// Gauss points: 5-node stencil [t_k - h/2, t_k+1 + h/2] per element (4 nodes
/// at the ends of the horizon). Returns an (n_gauss x (2 N_T + 1)) matrix.
SparseMatrix nnr_to_gauss(const TimeGrid& grid);

/// 100 sqrt(|s_N - s_L|^2 / |s_N|^2 + |e_N - e_L|^2 / |e_N|^2) in percent.
double compare_error(const FieldST& sigma_ref, const FieldST& eps_ref, const FieldST& sigma, const FieldST& eps,
                     const SpaceTimeQuadrature& q);

}  // namespace latinpgd

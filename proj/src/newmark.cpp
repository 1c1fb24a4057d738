#include "latinpgd/newmark.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace latinpgd {

double LoadCase::value(double t) const {
  double g = 0;
  for (const auto& s : sines) g += s.amplitude * std::sin(2 * std::numbers::pi * s.frequency * t);
  return g;
}

double LoadCase::rate(double t) const {
  double g = 0;
  for (const auto& s : sines) {
    const double w = 2 * std::numbers::pi * s.frequency;
    g += s.amplitude * w * std::cos(w * t);
  }
  return g;
}

double LoadCase::accel(double t) const {
  double g = 0;
  for (const auto& s : sines) {
    const double w = 2 * std::numbers::pi * s.frequency;
    g -= s.amplitude * w * w * std::sin(w * t);
  }
  return g;
}

Eigen::VectorXd support_pattern(const SpatialSystem& system) {
  const auto& pres = system.prescribed_dofs();
  Eigen::VectorXd p(static_cast<Eigen::Index>(pres.size()));
  for (size_t i = 0; i < pres.size(); ++i) p[static_cast<Eigen::Index>(i)] = pres[i] % 3 == 2 ? 1.0 : 0.0;
  return p;
}

void LinearStress::evaluate(const Eigen::VectorXd& eps, double, Eigen::VectorXd& sigma) {
  sigma.resize(eps.size());
  for (Eigen::Index g = 0; g < eps.size() / 6; ++g) {
    const Vector6 s = hooke_.stiffness() * Vector6(eps.segment<6>(6 * g));
    sigma.segment<6>(6 * g) = s;
  }
}

DamageStress::DamageStress(const MaterialParams& p, int n_gauss)
    : p_(p), hooke_(p.hooke()), committed_(n_gauss), trial_(n_gauss) {}

void DamageStress::evaluate(const Eigen::VectorXd& eps, double t, Eigen::VectorXd& sigma) {
  const int n = static_cast<int>(committed_.size());
  if (eps.size() != 6 * n) throw std::invalid_argument("DamageStress: strain size mismatch");
  sigma.resize(eps.size());
#pragma omp parallel for schedule(static)
  for (int g = 0; g < n; ++g) {
    trial_[g] = committed_[g];
    sigma.segment<6>(6 * g) = advance_point(trial_[g], eps.segment<6>(6 * g), t, p_, hooke_).sigma;
  }
}

void DamageStress::damage(Eigen::Ref<Eigen::VectorXd> d) const {
  for (size_t g = 0; g < committed_.size(); ++g) d[static_cast<Eigen::Index>(g)] = committed_[g].d;
}

NnrResult newmark_integrate(const SpatialSystem& sys, StressModel& model, const LoadCase& load,
                            const NnrConfig& cfg) {
  if (!(cfg.tolerance > 0)) throw std::invalid_argument("newmark: tolerance must be positive");
  if (cfg.steps < 1 || !(cfg.horizon > 0)) throw std::invalid_argument("newmark: invalid time grid");
  const double dt = cfg.horizon / cfg.steps;
  const double beta = cfg.beta, gamma = cfg.gamma;
  const int nd = sys.mesh().num_dofs();
  const int ng = sys.num_gauss();
  const auto& free = sys.free_dofs();
  const auto& pres = sys.prescribed_dofs();
  const Eigen::VectorXd pattern = support_pattern(sys);
  const SparseMatrix& b = sys.strain_op();
  const Eigen::VectorXd& w = sys.weights();

  NnrResult res;
  res.times = Eigen::VectorXd::LinSpaced(cfg.steps + 1, 0.0, cfg.horizon);
  res.u = Eigen::MatrixXd::Zero(nd, cfg.steps + 1);
  res.v = res.u;
  res.a = res.u;
  res.eps = FieldST::Zero(6 * ng, cfg.steps + 1);
  res.sigma = res.eps;
  res.d = Eigen::MatrixXd::Zero(ng, cfg.steps + 1);

  // Static lift of a unit support displacement onto the free dofs.
  Eigen::VectorXd lift = Eigen::VectorXd::Zero(sys.num_free());
  if (cfg.start == InitialVelocity::quasi_static || (sys.damped() && cfg.damping == DampingFrame::relative)) {
    Eigen::SimplicialLLT<SparseMatrix> kllt(sys.stiffness_ff());
    if (kllt.info() != Eigen::Success) throw std::runtime_error("newmark: free stiffness is not positive definite");
    lift = kllt.solve(Eigen::VectorXd(-(sys.stiffness_fp() * pattern)));
  }
  // Damping force on the free dofs per unit support rate.
  Eigen::VectorXd damping_p = Eigen::VectorXd::Zero(sys.num_free());
  if (sys.damped())
    damping_p = cfg.damping == DampingFrame::relative ? Eigen::VectorXd(-(sys.damping_ff() * lift))
                                                      : Eigen::VectorXd(sys.damping_fp() * pattern);
  const Eigen::VectorXd mass_p = sys.mass_fp() * pattern;

  auto effective_load = [&](double t) {
    return Eigen::VectorXd(-(mass_p * load.accel(t) + damping_p * load.rate(t) +
                             sys.stiffness_fp() * (pattern * load.value(t))));
  };
  for (int n = 0; n <= cfg.steps; ++n) res.force_reference = std::max(res.force_reference, effective_load(res.times[n]).norm());
  const double tol_abs = cfg.tolerance * res.force_reference;

  auto set_prescribed = [&](int n) {
    const double t = res.times[n];
    for (size_t i = 0; i < pres.size(); ++i) {
      const Eigen::Index j = static_cast<Eigen::Index>(i);
      res.u(pres[i], n) = pattern[j] * load.value(t);
      res.v(pres[i], n) = pattern[j] * load.rate(t);
      res.a(pres[i], n) = pattern[j] * load.accel(t);
    }
  };
  auto gather = [&](const Eigen::VectorXd& full) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(free.size()));
    for (size_t i = 0; i < free.size(); ++i) out[static_cast<Eigen::Index>(i)] = full[free[i]];
    return out;
  };
  auto scatter = [&](const Eigen::VectorXd& f, Eigen::Ref<Eigen::VectorXd> full) {
    for (size_t i = 0; i < free.size(); ++i) full[free[i]] = f[static_cast<Eigen::Index>(i)];
  };

  // Initial state: zero displacement on free dofs, velocity at rest or the
  // quasi-static lift of the support rate, acceleration from equilibrium at
  // t = 0 (mass solve by conjugate gradients).
  set_prescribed(0);
  if (cfg.start == InitialVelocity::quasi_static) scatter(lift * load.rate(0.0), res.v.col(0));
  {
    Eigen::VectorXd eps0 = b * Eigen::VectorXd(res.u.col(0));
    Eigen::VectorXd sig0;
    model.evaluate(eps0, 0.0, sig0);
    model.commit();
    res.eps.col(0) = eps0;
    res.sigma.col(0) = sig0;
    const Eigen::VectorXd fint = gather(b.transpose() * weight_space(sig0, w));
    Eigen::VectorXd rhs = -(mass_p * load.accel(0.0) + damping_p * load.rate(0.0)) - fint;
    if (sys.damped()) rhs -= sys.damping_ff() * gather(res.v.col(0));
    if (rhs.norm() > 0) {
      Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper> cg;
      cg.setTolerance(1e-14);
      cg.setMaxIterations(10 * sys.num_free());
      cg.compute(sys.mass_ff());
      scatter(cg.solve(rhs), res.a.col(0));
    }
  }

  SparseMatrix keff = sys.mass_ff() / (beta * dt * dt) + sys.stiffness_ff();
  if (sys.damped()) keff += sys.damping_ff() * (gamma / (beta * dt));
  Eigen::SimplicialLLT<SparseMatrix> llt(keff);
  if (llt.info() != Eigen::Success) throw std::runtime_error("newmark: effective matrix is not positive definite");
  res.factorizations = 1;

  Eigen::VectorXd eps, sig;
  for (int n = 0; n < cfg.steps; ++n) {
    set_prescribed(n + 1);
    const double t = res.times[n + 1];
    const Eigen::VectorXd un = gather(res.u.col(n));
    const Eigen::VectorXd vn = gather(res.v.col(n));
    const Eigen::VectorXd an = gather(res.a.col(n));
    const Eigen::VectorXd inertia_p = mass_p * load.accel(t) + damping_p * load.rate(t);
    Eigen::VectorXd uf = un + dt * vn + dt * dt * (0.5 - beta) * an;
    Eigen::VectorXd af, vf;
    Eigen::VectorXd full = res.u.col(n + 1);
    int it = 0;
    for (;; ++it) {
      af = (uf - un - dt * vn) / (beta * dt * dt) - (0.5 - beta) / beta * an;
      vf = vn + dt * ((1 - gamma) * an + gamma * af);
      scatter(uf, full);
      eps = b * full;
      model.evaluate(eps, t, sig);
      const Eigen::VectorXd fint = gather(b.transpose() * weight_space(sig, w));
      Eigen::VectorXd r = -(sys.mass_ff() * af) - inertia_p - fint;
      if (sys.damped()) r -= sys.damping_ff() * vf;
      if (r.norm() <= tol_abs) break;
      if (it >= cfg.max_iterations)
        throw std::runtime_error("newmark: no equilibrium after " + std::to_string(cfg.max_iterations) +
                                 " iterations at step " + std::to_string(n + 1));
      uf += llt.solve(r);
    }
    model.commit();
    res.iterations.push_back(it);
    res.u.col(n + 1) = full;
    scatter(vf, res.v.col(n + 1));
    scatter(af, res.a.col(n + 1));
    res.eps.col(n + 1) = eps;
    res.sigma.col(n + 1) = sig;
    model.damage(res.d.col(n + 1));
  }
  return res;
}

NnrResult newmark_quasi_newton(const SpatialSystem& system, const MaterialParams& p, const LoadCase& load,
                               const NnrConfig& config) {
  DamageStress model(p, system.num_gauss());
  return newmark_integrate(system, model, load, config);
}

SparseMatrix nnr_to_gauss(const TimeGrid& grid) {
  const int n_el = grid.num_elements();
  const int n_nodes = 2 * n_el + 1;
  const double dt = grid.step() / 2;
  std::vector<Eigen::Triplet<double>> trip;
  for (int k = 0; k < n_el; ++k) {
    const int j0 = std::max(0, 2 * k - 1);
    const int j1 = std::min(n_nodes - 1, 2 * k + 3);
    const int m = j1 - j0 + 1;
    const double tc = (k + 0.5) * grid.step();
    Eigen::MatrixXd v(m, 4);
    for (int j = 0; j < m; ++j) {
      const double s = ((j0 + j) * dt - tc) / grid.step();
      v.row(j) << 1, s, s * s, s * s * s;
    }
    const Eigen::MatrixXd fit = (v.transpose() * v).ldlt().solve(v.transpose());  // 4 x m
    for (int q = 0; q < 4; ++q) {
      const double s = grid.gauss_points()[q] - 0.5;
      const Eigen::RowVector4d e(1, s, s * s, s * s * s);
      const Eigen::RowVectorXd row = e * fit;
      for (int j = 0; j < m; ++j) trip.emplace_back(4 * k + q, j0 + j, row[j]);
    }
  }
  SparseMatrix p(grid.num_gauss(), n_nodes);
  p.setFromTriplets(trip.begin(), trip.end());
  return p;
}

double compare_error(const FieldST& sigma_ref, const FieldST& eps_ref, const FieldST& sigma, const FieldST& eps,
                     const SpaceTimeQuadrature& q) {
  const double ns = st_norm2(sigma_ref, Flavor::stress, q);
  const double ne = st_norm2(eps_ref, Flavor::strain, q);
  if (!(ns > 0) || !(ne > 0)) throw std::runtime_error("compare_error: reference fields are zero");
  const double es = st_norm2(sigma_ref - sigma, Flavor::stress, q);
  const double ee = st_norm2(eps_ref - eps, Flavor::strain, q);
  return 100.0 * std::sqrt(es / ns + ee / ne);
}

}  // namespace latinpgd

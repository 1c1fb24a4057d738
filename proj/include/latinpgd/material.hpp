// Isotropic damage with delay and progressive crack re-closure.
#pragma once

#include "latinpgd/tensor.hpp"

#include <Eigen/Dense>

#include <vector>

namespace latinpgd {

struct MaterialParams {
  double rho = 2550;       // kg/m^3
  double young = 37.9e9;   // Pa
  double poisson = 0.2;    // -
  double y0 = 150;         // J/m^3
  double a_d = 8e-3;       // m^3/J
  double tau_c = 0.05;     // s
  double a_delay = 15;     // -
  double a_c = 9;          // -
  double xi = 0.02;        // modal damping ratio

  void validate() const;
  Hooke hooke() const { return Hooke(young, poisson); }
};

/// tr(eps_max) below this leaves no crack to close.
inline constexpr double kClosureGuard = 1e-12;

double released_energy(const SymTensor& eps, const Hooke& hooke);
double static_damage(double y, const MaterialParams& p);
double dual_softening(double z, const MaterialParams& p);

/// Delay law d' = (1/tau_c)(1 - exp(-a <dbar - d>_+)) on sample times t
/// (d(t_0) = d_init); dbar is linear between samples.
Eigen::VectorXd integrate_delay(const Eigen::VectorXd& times, const Eigen::VectorXd& dbar, double d_init,
                                const MaterialParams& p);

SymTensor crack_closure_stress(const SymTensor& eps, const SymTensor& eps_max, const MaterialParams& p,
                               const Hooke& hooke);
SymTensor total_stress(const SymTensor& eps, const SymTensor& eps_max, double d, const MaterialParams& p,
                       const Hooke& hooke);

/// Internal state of one Gauss point carried along its time axis.
struct PointHistory {
  double t = 0;
  double dbar = 0;
  double z = 0;
  double zz = 0;  // Z, dual softening variable
  double d = 0;
  Vector6 eps_max = Vector6::Zero();
  double tr_eps_max = 0;
};

struct PointSample {
  Vector6 sigma = Vector6::Zero();
  double y = 0;
  double dbar = 0;
  double z = 0;
  double zz = 0;
  double d = 0;
};

/// Advance a Gauss point from h.t to t with strain eps (Voigt, engineering
/// shear): threshold test, damage-branch update, delayed damage, history
/// update and stress. Shared by the local stage, the 0D driver and the
/// incremental reference solver.
PointSample advance_point(PointHistory& h, const Vector6& eps, double t, const MaterialParams& p, const Hooke& hooke);

/// Stress of a strain at fixed state (no history change).
Vector6 point_stress(const Vector6& eps, const PointHistory& h, const MaterialParams& p, const Hooke& hooke);

struct MatpointSeries {
  Eigen::VectorXd t, eps_x, sigma_x, d, dbar, y;
};

/// Uniaxial strain diag(eps_x, 0, 0) history through the material law.
MatpointSeries matpoint_drive(const Eigen::VectorXd& times, const Eigen::VectorXd& eps_x, const MaterialParams& p);

}  // namespace latinpgd

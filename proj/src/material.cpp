#include "latinpgd/material.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace latinpgd {

namespace {

double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double delay_rate(double d, double dbar, const MaterialParams& p) {
  const double gap = std::max(dbar - d, 0.0);
  return (1.0 - std::exp(-p.a_delay * gap)) / p.tau_c;
}

// RK4 from t0 to t1 with dbar linear between dbar0 and dbar1.
double delay_segment(double d, double t0, double t1, double dbar0, double dbar1, const MaterialParams& p) {
  const double span = t1 - t0;
  if (span <= 0) return d;
  const double max_sub = p.tau_c / 20.0;
  const int n = std::max(1, static_cast<int>(std::ceil(span / max_sub - 1e-12)));
  const double dt = span / n;
  auto dbar_at = [&](double s) { return dbar0 + (dbar1 - dbar0) * s; };
  for (int i = 0; i < n; ++i) {
    const double s0 = static_cast<double>(i) / n;
    const double sm = (i + 0.5) / n;
    const double s1 = static_cast<double>(i + 1) / n;
    const double k1 = delay_rate(d, dbar_at(s0), p);
    const double k2 = delay_rate(d + 0.5 * dt * k1, dbar_at(sm), p);
    const double k3 = delay_rate(d + 0.5 * dt * k2, dbar_at(sm), p);
    const double k4 = delay_rate(d + dt * k3, dbar_at(s1), p);
    d += dt * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0;
  }
  return d;
}

}  // namespace

void MaterialParams::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0) || !std::isfinite(v)) throw std::invalid_argument(std::string("material: ") + name + " must be positive");
  };
  positive(rho, "rho");
  positive(young, "young");
  positive(y0, "y0");
  positive(a_d, "a_d");
  positive(tau_c, "tau_c");
  positive(a_delay, "a_delay");
  positive(a_c, "a_c");
  if (!(poisson >= 0 && poisson < 0.5)) throw std::invalid_argument("material: poisson must lie in [0, 0.5)");
  if (!(xi >= 0 && xi < 1)) throw std::invalid_argument("material: xi must lie in [0, 1)");
}

double released_energy(const SymTensor& eps, const Hooke& hooke) {
  const SymTensor pos = macaulay_positive(eps);
  return 0.5 * energy_contract(pos, hooke, pos);
}

double static_damage(double y, const MaterialParams& p) {
  if (y <= p.y0) return 0.0;
  return 1.0 - 1.0 / (1.0 + p.a_d * (y - p.y0));
}

double dual_softening(double z, const MaterialParams& p) {
  if (!(z > -1.0)) throw std::invalid_argument("dual_softening: z must be greater than -1");
  return (-1.0 + 1.0 / (1.0 + z)) / p.a_d;
}

Eigen::VectorXd integrate_delay(const Eigen::VectorXd& times, const Eigen::VectorXd& dbar, double d_init,
                                const MaterialParams& p) {
  if (times.size() != dbar.size()) throw std::invalid_argument("integrate_delay: size mismatch");
  if (!(d_init >= 0 && d_init < 1)) throw std::invalid_argument("integrate_delay: d_init must lie in [0, 1)");
  Eigen::VectorXd d(times.size());
  if (times.size() == 0) return d;
  d[0] = d_init;
  for (Eigen::Index i = 1; i < times.size(); ++i)
    d[i] = delay_segment(d[i - 1], times[i - 1], times[i], dbar[i - 1], dbar[i], p);
  return d;
}

SymTensor crack_closure_stress(const SymTensor& eps, const SymTensor& eps_max, const MaterialParams& p,
                               const Hooke& hooke) {
  const double tr_max = eps_max.trace();
  if (!(tr_max > kClosureGuard)) throw std::invalid_argument("crack_closure_stress: tr(eps_max) below guard");
  const double lg = softplus(p.a_c * eps.trace() / tr_max);
  const Vector6 f = eps.voigt() - eps_max.voigt() * (lg / p.a_c);
  return SymTensor::stress(hooke.stiffness() * f);
}

SymTensor total_stress(const SymTensor& eps, const SymTensor& eps_max, double d, const MaterialParams& p,
                       const Hooke& hooke) {
  if (!(d >= 0 && d < 1)) throw std::invalid_argument("total_stress: d must lie in [0, 1)");
  const Vector6 me = hooke.stiffness() * eps.voigt();
  if (d == 0 || !(eps_max.trace() > kClosureGuard)) return SymTensor::stress((1 - d) * me);
  const Vector6 cr = crack_closure_stress(eps, eps_max, p, hooke).voigt();
  return SymTensor::stress((1 - d) * me + d * cr);
}

Vector6 point_stress(const Vector6& eps, const PointHistory& h, const MaterialParams& p, const Hooke& hooke) {
  return total_stress(SymTensor::strain(eps), SymTensor::strain(h.eps_max), h.d, p, hooke).voigt();
}

PointSample advance_point(PointHistory& h, const Vector6& eps, double t, const MaterialParams& p, const Hooke& hooke) {
  PointSample s;
  const SymTensor e = SymTensor::strain(eps);
  s.y = released_energy(e, hooke);
  const double f = s.y - (p.y0 + h.zz);
  const double dbar_prev = h.dbar;
  if (f > 0) {
    h.dbar = static_damage(s.y, p);
    h.z = -h.dbar;
    h.zz = dual_softening(h.z, p);
  }
  h.d = delay_segment(h.d, h.t, t, dbar_prev, h.dbar, p);
  h.t = t;
  const double tr = e.trace();
  if (tr > h.tr_eps_max) {
    h.tr_eps_max = tr;
    h.eps_max = eps;
  }
  s.sigma = point_stress(eps, h, p, hooke);
  s.dbar = h.dbar;
  s.z = h.z;
  s.zz = h.zz;
  s.d = h.d;
  return s;
}

MatpointSeries matpoint_drive(const Eigen::VectorXd& times, const Eigen::VectorXd& eps_x, const MaterialParams& p) {
  if (times.size() != eps_x.size()) throw std::invalid_argument("matpoint_drive: size mismatch");
  p.validate();
  const Hooke hooke = p.hooke();
  MatpointSeries out;
  const Eigen::Index n = times.size();
  out.t = times;
  out.eps_x = eps_x;
  out.sigma_x.resize(n);
  out.d.resize(n);
  out.dbar.resize(n);
  out.y.resize(n);
  // The point starts from rest at t = 0.
  PointHistory h;
  for (Eigen::Index i = 0; i < n; ++i)
    if (times[i] < (i ? times[i - 1] : 0.0)) throw std::invalid_argument("matpoint_drive: times must be non-negative and non-decreasing");
  for (Eigen::Index i = 0; i < n; ++i) {
    Vector6 eps = Vector6::Zero();
    eps[0] = eps_x[i];
    const PointSample s = advance_point(h, eps, times[i], p, hooke);
    out.sigma_x[i] = s.sigma[0];
    out.d[i] = s.d;
    out.dbar[i] = s.dbar;
    out.y[i] = s.y;
  }
  return out;
}

}  // namespace latinpgd

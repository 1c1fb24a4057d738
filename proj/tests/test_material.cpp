#include "latinpgd/local_stage.hpp"
#include "latinpgd/material.hpp"

#include <doctest.h>

#include <random>

using namespace latinpgd;

TEST_CASE("static damage and its dual softening law") {
  const MaterialParams p;
  CHECK(static_damage(p.y0, p) == 0);
  CHECK(static_damage(0.5 * p.y0, p) == 0);
  const double y = p.y0 + 250;
  CHECK(static_damage(y, p) == doctest::Approx(1 - 1 / (1 + p.a_d * 250)));
  // Z(z) with z = -dbar(y) returns the excess energy y - y0.
  CHECK(dual_softening(-static_damage(y, p), p) == doctest::Approx(250));
  CHECK(dual_softening(0, p) == 0);
  CHECK_THROWS_AS(dual_softening(-1, p), std::invalid_argument);
}

TEST_CASE("released energy uses the positive part of the strain") {
  const Hooke c(37.9e9, 0.2);
  const SymTensor t = SymTensor::strain((Vector6() << 1e-4, 0, 0, 0, 0, 0).finished());
  CHECK(released_energy(t, c) == doctest::Approx(0.5 * c.stiffness()(0, 0) * 1e-8));
  CHECK(released_energy(-1.0 * t, c) == 0);
  // Uniaxial threshold strain of the reference material.
  const MaterialParams p;
  const double e_th = std::sqrt(2 * p.y0 / c.stiffness()(0, 0));
  CHECK(e_th == doctest::Approx(8.44e-5).epsilon(0.01));
}

TEST_CASE("delay law: bounded rate and convergence towards dbar") {
  const MaterialParams p;
  const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(401, 0, 2);
  const Eigen::VectorXd dbar = Eigen::VectorXd::Constant(401, 0.6);
  const Eigen::VectorXd d = integrate_delay(t, dbar, 0.0, p);
  for (int i = 1; i < d.size(); ++i) {
    CHECK(d(i) >= d(i - 1));
    CHECK((d(i) - d(i - 1)) / (t(i) - t(i - 1)) <= 1 / p.tau_c + 1e-9);
  }
  CHECK(d(400) <= 0.6);
  CHECK(d(400) > 0.5);
  CHECK_THROWS_AS(integrate_delay(t, dbar, 1.0, p), std::invalid_argument);
}

TEST_CASE("crack closure restores the undamaged stiffness in compression") {
  const MaterialParams p;
  const Hooke c = p.hooke();
  const Eigen::VectorXd t = Eigen::VectorXd::LinSpaced(200, 0.005, 1.0);
  Eigen::VectorXd eps = Eigen::VectorXd::Zero(200);
  for (int i = 0; i < 100; ++i) eps(i) = 4e-4 * (i + 1) / 100.0;
  for (int i = 100; i < 200; ++i) eps(i) = 4e-4 - 1.2e-3 * (i - 99) / 100.0;
  const MatpointSeries s = matpoint_drive(t, eps, p);
  CHECK(s.d(199) > 0.3);
  const double secant = s.sigma_x(199) / s.eps_x(199);
  CHECK(secant == doctest::Approx(c.stiffness()(0, 0)).epsilon(0.01));
  // Tension side is softened by the damage.
  CHECK(s.sigma_x(99) / s.eps_x(99) < 0.9 * c.stiffness()(0, 0));
}

TEST_CASE("randomized histories satisfy the damage invariants") {
  const MaterialParams p;
  const Hooke c = p.hooke();
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> amp(0, 6e-4), comp(-1, 1), dt(1e-3, 2e-2);
  for (int trial = 0; trial < 200; ++trial) {
    PointHistory h;
    double t = 0;
    Vector6 dir;
    for (int k = 0; k < 6; ++k) dir(k) = comp(rng);
    const double a = amp(rng);
    double d_prev = 0, t_prev = 0;
    for (int k = 0; k < 50; ++k) {
      t += dt(rng);
      const Vector6 eps = a * std::sin(7.0 * t + trial) * dir;
      const PointSample s = advance_point(h, eps, t, p, c);
      CHECK(s.d >= 0);
      CHECK(s.d < 1);
      CHECK(s.d >= d_prev);
      CHECK((s.d - d_prev) / (t - t_prev) <= 1 / p.tau_c + 1e-9);
      CHECK(s.y - (p.y0 + s.zz) <= 1e-9 * std::max(1.0, s.y));
      d_prev = s.d;
      t_prev = t;
    }
  }
}

TEST_CASE("local stage equals point-by-point integration and ignores processing order") {
  const MaterialParams p;
  const int n_s = 5, n_t = 30;
  const Eigen::VectorXd times = Eigen::VectorXd::LinSpaced(n_t, 0.01, 0.6);
  FieldST eps(6 * n_s, n_t);
  for (int g = 0; g < n_s; ++g)
    for (int k = 0; k < n_t; ++k)
      eps.block<6, 1>(6 * g, k) = Vector6::Constant(1e-4 * (g + 1) * std::sin(10 * times(k)));
  const LocalFields a = local_stage(eps, times, p);
  const std::vector<int> order{4, 2, 0, 3, 1};
  const LocalFields b = local_stage(eps, times, p, &order);
  CHECK((a.sigma - b.sigma).norm() == 0);
  CHECK((a.d - b.d).norm() == 0);
  PointHistory h;
  for (int k = 0; k < n_t; ++k) {
    const PointSample s = advance_point(h, eps.block<6, 1>(18, k), times(k), p, p.hooke());
    CHECK(s.d == a.d(3, k));
  }
  FieldST bad = eps;
  bad(7, 3) = std::nan("");
  CHECK_THROWS_AS(local_stage(bad, times, p), std::runtime_error);
}

TEST_CASE("parameter validation") {
  MaterialParams p;
  CHECK_NOTHROW(p.validate());
  p.poisson = 0.5;
  CHECK_THROWS(p.validate());
  p = MaterialParams{};
  p.tau_c = 0;
  CHECK_THROWS(p.validate());
}

#include "latinpgd/latin.hpp"
#include "latinpgd/newmark.hpp"

#include <doctest.h>

#include <cmath>

using namespace latinpgd;

namespace {

struct Beam {
  MaterialParams p;
  SpatialSystem sys;
  explicit Beam(bool damped = false)
      : sys(generate_box_mesh(8, 0.3, 0.3, 16, 2, 2, SupportKind::midline), p.rho, p.hooke(),
            damped ? rayleigh_coeffs(0.02, 8.99, 45.8) : RayleighDamping{}) {}
};

Eigen::MatrixXd free_rows(const SpatialSystem& sys, const Eigen::MatrixXd& full) {
  Eigen::MatrixXd out(sys.num_free(), full.cols());
  for (Eigen::Index k = 0; k < full.cols(); ++k) out.col(k) = sys.restrict_free(full.col(k));
  return out;
}

}  // namespace

TEST_CASE("load derivatives are consistent") {
  const LoadCase l{{{0.01, 3.0}, {0.02, 1.3}}};
  const double t = 0.37, h = 1e-5;
  CHECK(l.rate(t) == doctest::Approx((l.value(t + h) - l.value(t - h)) / (2 * h)).epsilon(1e-7));
  CHECK(l.accel(t) == doctest::Approx((l.rate(t + h) - l.rate(t - h)) / (2 * h)).epsilon(1e-6));
  CHECK(l.value(0) == 0);
}

TEST_CASE("comparison error formula") {
  const SpaceTimeQuadrature q{Eigen::VectorXd::Constant(2, 0.5), Eigen::VectorXd::Constant(3, 1.0)};
  const FieldST s = FieldST::Random(12, 3), e = FieldST::Random(12, 3);
  CHECK(compare_error(s, e, s, e, q) == 0);
  CHECK(compare_error(s, e, 1.01 * s, 1.01 * e, q) == doctest::Approx(100 * std::sqrt(2.0) * 0.01).epsilon(1e-9));
  CHECK(compare_error(1.01 * s, 1.01 * e, s, e, q) == doctest::Approx(100 * std::sqrt(2.0) * 0.01 / 1.01).epsilon(1e-9));
  CHECK_THROWS_AS(compare_error(FieldST::Zero(12, 3), e, s, e, q), std::runtime_error);
}

TEST_CASE("node-to-gauss transfer reproduces cubics") {
  const TimeGrid g(2.0, 7);
  const SparseMatrix p = nnr_to_gauss(g);
  REQUIRE(p.rows() == g.num_gauss());
  REQUIRE(p.cols() == 2 * 7 + 1);
  const Eigen::VectorXd nodes = Eigen::VectorXd::LinSpaced(15, 0, 2);
  auto cubic = [](double t) { return 0.3 - t + 2 * t * t - 0.7 * t * t * t; };
  const Eigen::VectorXd fit = p * nodes.unaryExpr(cubic);
  const Eigen::VectorXd exact = g.gauss_times().unaryExpr(cubic);
  CHECK((fit - exact).norm() < 1e-12 * exact.norm());
  CHECK((Eigen::MatrixXd(p) * Eigen::VectorXd::Ones(15) - Eigen::VectorXd::Ones(g.num_gauss())).norm() < 1e-12);
}

TEST_CASE("undamped linear run obeys the discrete energy balance of the trapezoidal rule") {
  const Beam b;
  const SpatialSystem& sys = b.sys;
  LinearStress model(sys.hooke());
  const LoadCase load{{{1e-3, 3.0}}};
  NnrConfig cfg;
  cfg.steps = 200;
  cfg.tolerance = 1e-10;
  const NnrResult r = newmark_integrate(sys, model, load, cfg);
  CHECK(r.factorizations == 1);
  const Eigen::MatrixXd u = free_rows(sys, r.u), v = free_rows(sys, r.v);
  const Eigen::VectorXd pat = support_pattern(sys);
  const Eigen::VectorXd mp = sys.mass_fp() * pat, kp = sys.stiffness_fp() * pat;
  auto force = [&](double t) -> Eigen::VectorXd { return -(mp * load.accel(t) + kp * load.value(t)); };
  auto energy = [&](int n) {
    return 0.5 * v.col(n).dot(sys.mass_ff() * v.col(n)) + 0.5 * u.col(n).dot(sys.stiffness_ff() * u.col(n));
  };
  double scale = 0, worst = 0;
  for (int n = 0; n < cfg.steps; ++n) {
    const double work = 0.5 * (u.col(n + 1) - u.col(n)).dot(force(r.times(n)) + force(r.times(n + 1)));
    worst = std::max(worst, std::abs(energy(n + 1) - energy(n) - work));
    scale = std::max(scale, energy(n + 1));
  }
  CHECK(worst <= 1e-6 * scale);
}

TEST_CASE("damage-free quasi-Newton run coincides with the elastic integrator") {
  const Beam b(true);
  const LoadCase load{{{1e-3, 3.0}}};
  NnrConfig cfg;
  cfg.steps = 100;
  cfg.tolerance = 1e-10;  // predictor iterates may touch the threshold, so match to tolerance
  const NnrResult n = newmark_quasi_newton(b.sys, b.p, load, cfg);
  LinearStress model(b.sys.hooke());
  const NnrResult e = newmark_integrate(b.sys, model, load, cfg);
  CHECK(n.d.maxCoeff() == 0);
  CHECK((n.u - e.u).norm() <= 1e-7 * e.u.norm());
  CHECK((n.sigma - e.sigma).norm() <= 1e-7 * e.sigma.norm());

  const TimeGrid g(cfg.horizon, cfg.steps / 2);
  const PgdSolution el = elastic_solution(b.sys, load, g, cfg);
  const SparseMatrix pt = SparseMatrix(nnr_to_gauss(g).transpose());
  CHECK((el.sigma_el - e.sigma * pt).norm() <= 1e-12 * el.sigma_el.norm());
}

TEST_CASE("damaging run: monotone bounded damage and a single factorization") {
  const Beam b(true);
  const LoadCase load{{{4e-2, 3.0}}};
  NnrConfig cfg;
  cfg.steps = 200;
  const NnrResult r = newmark_quasi_newton(b.sys, b.p, load, cfg);
  CHECK(r.factorizations == 1);
  CHECK(r.d.maxCoeff() > 0.05);
  CHECK(r.d.maxCoeff() < 1);
  CHECK(r.d.minCoeff() >= 0);
  const double dt = r.times(1) - r.times(0);
  for (Eigen::Index k = 1; k < r.d.cols(); ++k) {
    const Eigen::VectorXd inc = r.d.col(k) - r.d.col(k - 1);
    CHECK(inc.minCoeff() >= 0);
    CHECK(inc.maxCoeff() / dt <= 1 / b.p.tau_c + 1e-9);
  }
}

TEST_CASE("equilibrium failure aborts with the step index") {
  const Beam b;
  NnrConfig cfg;
  cfg.steps = 50;
  cfg.max_iterations = 1;
  cfg.tolerance = 1e-14;
  const LoadCase load{{{8e-2, 3.0}}};
  CHECK_THROWS_WITH_AS(newmark_quasi_newton(b.sys, b.p, load, cfg), doctest::Contains("at step"), std::runtime_error);
  cfg.tolerance = 0;
  CHECK_THROWS_AS(newmark_quasi_newton(b.sys, b.p, load, cfg), std::invalid_argument);
}

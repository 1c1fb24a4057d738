#include "latinpgd/time_grid.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>

using namespace latinpgd;

namespace {

// x'' + w^2 x = sin(W t), x(0) = x'(0) = 0.
double forced_undamped(double t, double w, double big_w) {
  return (std::sin(big_w * t) - (big_w / w) * std::sin(w * t)) / (w * w - big_w * big_w);
}

double l2_error(const TimeFunction& x, const std::function<double(double)>& exact, double* ref_norm = nullptr) {
  const Eigen::VectorXd t = x.grid().gauss_times();
  const Eigen::VectorXd w = x.grid().gauss_weights();
  const Eigen::VectorXd v = x.at_gauss();
  double e = 0, n = 0;
  for (int q = 0; q < t.size(); ++q) {
    const double r = exact(t(q));
    e += w(q) * (v(q) - r) * (v(q) - r);
    n += w(q) * r * r;
  }
  if (ref_norm) *ref_norm = std::sqrt(n);
  return std::sqrt(e / n);
}

}  // namespace

TEST_CASE("quadrature integrates degree-7 polynomials exactly") {
  const TimeGrid g(2.0, 5);
  const Eigen::VectorXd t = g.gauss_times();
  const Eigen::VectorXd w = g.gauss_weights();
  CHECK(w.sum() == doctest::Approx(2.0));
  CHECK((w.array() * t.array().pow(7)).sum() == doctest::Approx(std::pow(2.0, 8) / 8).epsilon(1e-13));
  for (int q = 1; q < t.size(); ++q) CHECK(t(q) > t(q - 1));
  CHECK(g.element_of(0.0) == 0);
  CHECK(g.element_of(2.0) == 4);
  CHECK(g.element_of(0.4) == 1);
}

TEST_CASE("shape functions: partition of unity and exact cubic derivatives") {
  const TimeGrid g(1.0, 4);
  for (double s : {0.0, 0.3, 0.77, 1.0}) {
    CHECK(g.shape(s).sum() == doctest::Approx(1));
    CHECK(std::abs(g.shape(s, 1).sum()) < 1e-10);
    CHECK(std::abs(g.shape(s, 2).sum()) < 1e-8);
  }
  auto cubic = [](double t) { return 1 - 2 * t + 3 * t * t - 4 * t * t * t; };
  auto dcubic = [](double t) { return -2 + 6 * t - 12 * t * t; };
  const TimeFunction f = l2_fit(g, g.gauss_times().unaryExpr(cubic));
  for (double t : {0.05, 0.41, 0.9}) {
    CHECK(f.value(t) == doctest::Approx(cubic(t)));
    CHECK(f.value(t, 1) == doctest::Approx(dcubic(t)));
    CHECK(f.value(t, 2) == doctest::Approx(6 - 24 * t));
  }
  CHECK(f.max_jump() < 1e-12);
  CHECK_THROWS_AS(g.shape(0.5, 4), std::invalid_argument);
}

TEST_CASE("time function algebra and inner product") {
  const TimeGrid g(2.0, 3);
  const TimeFunction one = TimeFunction::constant(g, 1.0);
  const TimeFunction two = one * 2.0;
  CHECK(st_inner(one, two) == doctest::Approx(4.0));
  CHECK((two - one).value(1.3) == doctest::Approx(1.0));
  CHECK((two + one).value(0.1) == doctest::Approx(3.0));
  const TimeGrid other(2.0, 4);
  CHECK_THROWS(one + TimeFunction::constant(other, 1.0));
}

TEST_CASE("forced undamped oscillator: jump scheme matches the analytic solution") {
  const double big_w = 2 * M_PI;  // forcing period 1 s
  const double w = 2 * M_PI * 1.7;
  const TimeGrid g(2.0, 80);  // 40 elements per forcing period
  const Eigen::VectorXd f = g.gauss_times().unaryExpr([&](double t) { return std::sin(big_w * t); });
  MarchReport report;
  const TimeFunction x = tdgm_march(g, 1.0, 0.0, w * w, f, 0.0, TdgScheme::jump, &report);
  double peak = 0;
  const double err = l2_error(x, [&](double t) { return forced_undamped(t, w, big_w); });
  const Eigen::VectorXd ts = Eigen::VectorXd::LinSpaced(2001, 0, 2);
  for (int i = 0; i < ts.size(); ++i) peak = std::max(peak, std::abs(forced_undamped(ts(i), w, big_w)));
  CHECK(err < 1e-2);
  CHECK(x.max_jump() < 1e-3 * peak);
  CHECK(report.factorizations == 1);

  const TimeGrid coarse(2.0, 40);
  const Eigen::VectorXd fc = coarse.gauss_times().unaryExpr([&](double t) { return std::sin(big_w * t); });
  const double err_coarse = l2_error(tdgm_march(coarse, 1.0, 0.0, w * w, fc), [&](double t) { return forced_undamped(t, w, big_w); });
  CHECK(err_coarse > 4 * err);
}

TEST_CASE("damped free decay from an initial value") {
  const double w = 2 * M_PI * 3, zeta = 0.05;
  const double wd = w * std::sqrt(1 - zeta * zeta);
  const TimeGrid g(1.0, 60);
  const TimeFunction x = tdgm_march(g, 1.0, 2 * zeta * w, w * w, Eigen::VectorXd::Zero(g.num_gauss()), 1.0);
  const double err = l2_error(x, [&](double t) {
    return std::exp(-zeta * w * t) * (std::cos(wd * t) + zeta * w / wd * std::sin(wd * t));
  });
  CHECK(err < 1e-4);
  CHECK(x.value(0.0) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("zero stiffness: constant load gives the exact parabola") {
  const TimeGrid g(1.0, 5);
  const TimeFunction x = tdgm_march(g, 2.0, 0.0, 0.0, Eigen::VectorXd::Constant(g.num_gauss(), 4.0));
  for (double t : {0.1, 0.5, 0.95}) CHECK(x.value(t) == doctest::Approx(t * t).epsilon(1e-9));
}

TEST_CASE("value-penalty scheme keeps value continuity") {
  const TimeGrid g(1.0, 40);
  const Eigen::VectorXd f = g.gauss_times().unaryExpr([](double t) { return std::sin(2 * M_PI * t); });
  const TimeFunction x = tdgm_march(g, 1.0, 0.0, 400.0, f, 0.0, TdgScheme::value_penalty);
  CHECK(x.at_gauss().allFinite());
  CHECK(x.max_jump() < 1e-2 * x.max_abs());
}

TEST_CASE("scheme names and input errors") {
  CHECK(parse_tdg_scheme("jump") == TdgScheme::jump);
  CHECK(parse_tdg_scheme(to_string(TdgScheme::value_penalty)) == TdgScheme::value_penalty);
  CHECK_THROWS_AS(parse_tdg_scheme("euler"), std::invalid_argument);
  const TimeGrid g(1.0, 2);
  CHECK_THROWS_AS(tdgm_march(g, 0, 0, 0, Eigen::VectorXd::Zero(8)), std::invalid_argument);
  CHECK_THROWS_AS(tdgm_march(g, 1, 0, 1, Eigen::VectorXd::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid(0.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid(1.0, 0), std::invalid_argument);
}

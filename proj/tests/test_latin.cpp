#include "latinpgd/latin.hpp"

#include <doctest.h>

using namespace latinpgd;

namespace {

struct Small {
  MaterialParams p;
  SpatialSystem sys{generate_box_mesh(8, 0.3, 0.3, 8, 1, 2, SupportKind::midline), p.rho, p.hooke(),
                    rayleigh_coeffs(0.02, 8.99, 45.8)};
  TimeGrid grid{1.0, 40};
};

}  // namespace

TEST_CASE("latin error formula") {
  const SpaceTimeQuadrature q{Eigen::VectorXd::Ones(2), Eigen::VectorXd::Ones(3)};
  const FieldST s = FieldST::Random(12, 3), e = FieldST::Random(12, 3);
  CHECK(latin_error(s, s, e, e, q) == 0);
  CHECK(latin_error(s, 0.9 * s, e, e, q) == doctest::Approx(0.1));
  CHECK(latin_error(s, 0.9 * s, e, 1.2 * e, q) == doctest::Approx(std::sqrt(0.01 + 0.04)));
  CHECK_THROWS_AS(latin_error(FieldST::Zero(12, 3), s, e, e, q), std::runtime_error);
}

TEST_CASE("monitored point is the arg max of the damage history") {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(4, 5);
  d(2, 3) = 0.4;
  d(1, 4) = 0.3;
  CHECK(monitored_point(d) == 2);
  CHECK_THROWS_AS(monitored_point(Eigen::MatrixXd()), std::invalid_argument);
}

TEST_CASE("elastic load converges at the first iteration without modes") {
  const Small s;
  LatinParams lp;
  lp.xi_stop = 1e-6;
  const LatinResult r = run_latin(s.sys, s.p, LoadCase{{{1e-3, 3.0}}}, s.grid, lp);
  CHECK(r.converged);
  REQUIRE(r.log.size() == 1);
  CHECK(r.log[0].xi < 1e-6);
  CHECK(r.solution.num_modes() == 0);
  CHECK(r.local.d.maxCoeff() == 0);
}

TEST_CASE("damaging load: error decreases and the mode cap is honoured") {
  const Small s;
  const LoadCase load{{{8e-2, 3.0}}};
  LatinParams lp;
  lp.xi_stop = 1e-12;
  lp.mode_cap = 6;
  const LatinResult r = run_latin(s.sys, s.p, load, s.grid, lp);
  CHECK_FALSE(r.converged);
  CHECK(r.solution.num_modes() == 6);
  CHECK(r.local.d.maxCoeff() > 0);
  CHECK(r.log.back().xi < r.log.front().xi);
  for (const auto& e : r.log) CHECK(e.cre >= 0);
  CHECK(r.space_analyses == 1);

  lp.mode_cap = 0;
  const LatinResult none = run_latin(s.sys, s.p, load, s.grid, lp);
  CHECK_FALSE(none.converged);
  CHECK(none.log.size() == 1);
}

TEST_CASE("runs are reproducible for a fixed seed") {
  const Small s;
  const LoadCase load{{{8e-2, 3.0}}};
  LatinParams lp;
  lp.xi_stop = 1e-12;
  lp.mode_cap = 3;
  const LatinResult a = run_latin(s.sys, s.p, load, s.grid, lp);
  const LatinResult b = run_latin(s.sys, s.p, load, s.grid, lp);
  CHECK((a.solution.eps_modes - b.solution.eps_modes).norm() == 0);
  CHECK((a.local.d - b.local.d).norm() == 0);
  CHECK_THROWS_AS(run_latin(s.sys, s.p, load, s.grid, LatinParams{.xi_stop = 0}), std::invalid_argument);
}

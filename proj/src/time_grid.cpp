#include "latinpgd/time_grid.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace latinpgd {

namespace {

constexpr std::array<double, 4> kNodeRef{0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};

// Monomial coefficients (ascending powers) of the Lagrange polynomial of node i.
std::array<double, 4> lagrange_monomials(int i) {
  std::array<double, 4> p{1, 0, 0, 0};
  double denom = 1;
  for (int j = 0; j < 4; ++j) {
    if (j == i) continue;
    // Multiply p by (s - s_j).
    std::array<double, 4> q{0, 0, 0, 0};
    for (int k = 0; k < 3; ++k) {
      q[k + 1] += p[k];
      q[k] -= kNodeRef[j] * p[k];
    }
    p = q;
    denom *= kNodeRef[i] - kNodeRef[j];
  }
  for (double& v : p) v /= denom;
  return p;
}

double eval_poly(const std::array<double, 4>& p, double s, int der) {
  double v = 0;
  for (int k = der; k < 4; ++k) {
    double coef = p[k];
    for (int m = 0; m < der; ++m) coef *= k - m;
    v += coef * std::pow(s, k - der);
  }
  return v;
}

}  // namespace

TdgScheme parse_tdg_scheme(const std::string& name) {
  if (name == "jump") return TdgScheme::jump;
  if (name == "value_penalty") return TdgScheme::value_penalty;
  throw std::invalid_argument("unknown TDG scheme '" + name + "' (expected jump or value_penalty)");
}

std::string to_string(TdgScheme scheme) { return scheme == TdgScheme::jump ? "jump" : "value_penalty"; }

TimeGrid::TimeGrid(double horizon, int n_elements) : horizon_(horizon), n_(n_elements) {
  if (!(horizon > 0)) throw std::invalid_argument("TimeGrid: horizon must be positive");
  if (n_elements < 1) throw std::invalid_argument("TimeGrid: need at least one element");
  h_ = horizon / n_elements;
  const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
  const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
  const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
  const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
  xg_ << 0.5 * (1 - b), 0.5 * (1 - a), 0.5 * (1 + a), 0.5 * (1 + b);
  wg_ << 0.5 * wb, 0.5 * wa, 0.5 * wa, 0.5 * wb;
  for (int der = 0; der < 3; ++der)
    for (int q = 0; q < 4; ++q) tab_[der].row(q) = shape(xg_[q], der).transpose();
}

Eigen::Vector4d TimeGrid::shape(double s, int der) const {
  if (der < 0 || der > 3) throw std::invalid_argument("TimeGrid::shape: derivative order out of range");
  Eigen::Vector4d v;
  const double scale = std::pow(h_, -der);
  for (int i = 0; i < 4; ++i) v[i] = eval_poly(lagrange_monomials(i), s, der) * scale;
  return v;
}

Eigen::VectorXd TimeGrid::gauss_times() const {
  Eigen::VectorXd t(num_gauss());
  for (int k = 0; k < n_; ++k)
    for (int q = 0; q < 4; ++q) t[4 * k + q] = (k + xg_[q]) * h_;
  return t;
}

Eigen::VectorXd TimeGrid::gauss_weights() const {
  Eigen::VectorXd w(num_gauss());
  for (int k = 0; k < n_; ++k) w.segment<4>(4 * k) = h_ * wg_;
  return w;
}

Eigen::VectorXd TimeGrid::node_times() const {
  Eigen::VectorXd t(num_dofs());
  for (int k = 0; k < n_; ++k)
    for (int i = 0; i < 4; ++i) t[4 * k + i] = (k + kNodeRef[i]) * h_;
  return t;
}

int TimeGrid::element_of(double t) const {
  const int k = static_cast<int>(std::floor(t / h_));
  return std::clamp(k, 0, n_ - 1);
}

TimeFunction::TimeFunction(const TimeGrid& grid) : grid_(grid), c_(Eigen::VectorXd::Zero(grid.num_dofs())) {}

TimeFunction::TimeFunction(const TimeGrid& grid, Eigen::VectorXd coefficients)
    : grid_(grid), c_(std::move(coefficients)) {
  if (c_.size() != grid_.num_dofs()) throw std::invalid_argument("TimeFunction: coefficient count mismatch");
}

TimeFunction TimeFunction::constant(const TimeGrid& grid, double value) {
  return {grid, Eigen::VectorXd::Constant(grid.num_dofs(), value)};
}

double TimeFunction::value(double t, int der) const {
  const int k = grid_.element_of(t);
  const double s = t / grid_.step() - k;
  return grid_.shape(s, der).dot(c_.segment<4>(4 * k));
}

Eigen::VectorXd TimeFunction::at_gauss(int der) const {
  Eigen::VectorXd out(grid_.num_gauss());
  Eigen::Map<Eigen::MatrixXd>(out.data(), 4, grid_.num_elements()) =
      grid_.gauss_shape(der) * Eigen::Map<const Eigen::MatrixXd>(c_.data(), 4, grid_.num_elements());
  return out;
}

double TimeFunction::jump(int k) const {
  if (k < 1 || k >= grid_.num_elements()) throw std::out_of_range("TimeFunction::jump: interior boundary expected");
  return c_[4 * k] - c_[4 * k - 1];
}

double TimeFunction::max_jump() const {
  double m = 0;
  for (int k = 1; k < grid_.num_elements(); ++k) m = std::max(m, std::abs(jump(k)));
  return m;
}

TimeFunction TimeFunction::operator+(const TimeFunction& o) const {
  if (grid_ != o.grid_) throw std::invalid_argument("TimeFunction: grid mismatch");
  return {grid_, c_ + o.c_};
}

TimeFunction TimeFunction::operator-(const TimeFunction& o) const {
  if (grid_ != o.grid_) throw std::invalid_argument("TimeFunction: grid mismatch");
  return {grid_, c_ - o.c_};
}

Eigen::MatrixXd gauss_values(const TimeGrid& grid, const Eigen::MatrixXd& coefficients, int der) {
  if (coefficients.rows() != grid.num_dofs()) throw std::invalid_argument("gauss_values: row count mismatch");
  Eigen::MatrixXd out(grid.num_gauss(), coefficients.cols());
  for (int k = 0; k < grid.num_elements(); ++k)
    out.middleRows<4>(4 * k).noalias() = grid.gauss_shape(der) * coefficients.middleRows<4>(4 * k);
  return out;
}

double st_inner(const TimeFunction& f, const TimeFunction& g) {
  if (f.grid() != g.grid()) throw std::invalid_argument("st_inner: grid mismatch");
  return (f.at_gauss().array() * g.at_gauss().array() * f.grid().gauss_weights().array()).sum();
}

TimeFunction l2_fit(const TimeGrid& grid, const Eigen::VectorXd& samples) {
  if (samples.size() != grid.num_gauss()) throw std::invalid_argument("l2_fit: one sample per Gauss point expected");
  // With 4 samples per element the weighted normal equations reduce to
  // interpolation at the Gauss points.
  const Eigen::Matrix4d& n = grid.gauss_shape(0);
  const Eigen::Matrix4d w = grid.gauss_ref_weights().asDiagonal();
  const Eigen::Matrix4d normal = n.transpose() * w * n;
  const Eigen::Matrix4d fit = normal.ldlt().solve(n.transpose() * w);
  Eigen::VectorXd c(grid.num_dofs());
  Eigen::Map<Eigen::MatrixXd>(c.data(), 4, grid.num_elements()) =
      fit * Eigen::Map<const Eigen::MatrixXd>(samples.data(), 4, grid.num_elements());
  return {grid, c};
}

TimeFunction tdgm_march(const TimeGrid& grid, double a, double c, double b, const Eigen::VectorXd& f_gauss,
                        double x_init, TdgScheme scheme, MarchReport* report) {
  if (a == 0 && b == 0 && c == 0) throw std::invalid_argument("tdgm_march: all coefficients are zero");
  if (f_gauss.size() != grid.num_gauss()) throw std::invalid_argument("tdgm_march: one load sample per Gauss point expected");
  const double h = grid.step();
  const Eigen::Matrix4d& n = grid.gauss_shape(0);
  const Eigen::Matrix4d& nd = grid.gauss_shape(1);
  const Eigen::Matrix4d& ndd = grid.gauss_shape(2);
  const Eigen::Vector4d w = h * grid.gauss_ref_weights();
  const Eigen::Matrix4d op = a * ndd + c * nd + b * n;  // row q: operator applied to shape i
  const Eigen::Vector4d n0 = grid.shape(0.0, 0), n1 = grid.shape(1.0, 0);
  const Eigen::Vector4d d0 = grid.shape(0.0, 1), d1 = grid.shape(1.0, 1);
  const bool algebraic = a == 0 && c == 0;

  // Test functions: shape values (projection and penalty scheme) or shape
  // derivatives (jump scheme).
  const bool jump = scheme == TdgScheme::jump && !algebraic;
  const Eigen::Matrix4d& test = jump ? nd : n;
  const Eigen::Matrix4d q = test.transpose() * w.asDiagonal() * op;

  Eigen::Matrix4d lhs = q;
  double value_weight = 0, velocity_weight = 0, penalty = 0;
  if (jump) {
    value_weight = b != 0 ? b : a / (h * h) + std::abs(c) / h;
    velocity_weight = a;
    lhs += velocity_weight * d0 * d0.transpose() + value_weight * n0 * n0.transpose();
  } else if (!algebraic) {
    penalty = 1.1 * q.cwiseAbs().maxCoeff();
    lhs(0, 0) += penalty;
  }

  Eigen::FullPivLU<Eigen::Matrix4d> lu(lhs);
  if (report) report->factorizations = 1;
  if (!lu.isInvertible())
    throw std::runtime_error("tdgm_march: singular element operator at element 0 (a=" + std::to_string(a) +
                             ", c=" + std::to_string(c) + ", b=" + std::to_string(b) + ")");

  Eigen::VectorXd coef(grid.num_dofs());
  double prev_value = x_init, prev_rate = 0;
  for (int k = 0; k < grid.num_elements(); ++k) {
    Eigen::Vector4d rhs = test.transpose() * w.cwiseProduct(f_gauss.segment<4>(4 * k));
    if (jump) {
      rhs += velocity_weight * prev_rate * d0 + value_weight * prev_value * n0;
    } else if (!algebraic) {
      rhs[0] += penalty * prev_value;
    }
    const Eigen::Vector4d x = lu.solve(rhs);
    if (!x.allFinite()) throw std::runtime_error("tdgm_march: non-finite solution at element " + std::to_string(k));
    coef.segment<4>(4 * k) = x;
    prev_value = n1.dot(x);
    prev_rate = d1.dot(x);
  }
  TimeFunction out(grid, coef);
  if (report) report->max_jump = out.max_jump();
  return out;
}

TimeFunction tdgm_march(double a, double c, double b, const TimeFunction& f, double x_init, TdgScheme scheme,
                        MarchReport* report) {
  return tdgm_march(f.grid(), a, c, b, f.at_gauss(), x_init, scheme, report);
}

}  // namespace latinpgd
